import { beforeEach, describe, expect, it, vi } from "vitest";

import { ResultsView } from "../src/results.js";
import type { SearchResponse } from "../src/types.js";
import searchFixture from "./fixtures/search_covid_pon1.json";

const RESULT = searchFixture as unknown as SearchResponse;

function makeView() {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const callbacks = {
    onFacetToggle: vi.fn(),
    onYearClick: vi.fn(),
    onOpenArticle: vi.fn(),
  };
  return { root, view: new ResultsView(root, callbacks), callbacks };
}

const NO_FILTERS = { journal: null, section: null, pubType: null, year: null };

describe("results view", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("renders hits exactly in server order with tier badges", () => {
    const { root, view } = makeView();
    view.render(RESULT, NO_FILTERS);
    const pmids = [...root.querySelectorAll(".hit")].map((el) =>
      Number((el as HTMLElement).dataset.pmid),
    );
    expect(pmids).toEqual(RESULT.hits.map((h) => h.pmid));
    const badges = [...root.querySelectorAll(".tier")].map((el) => el.className);
    expect(badges).toEqual(["tier tier-3", "tier tier-2", "tier tier-1"]);
  });

  it("renders snippet highlights as marks without changing the text", () => {
    const { root, view } = makeView();
    view.render(RESULT, NO_FILTERS);
    const snippets = [...root.querySelectorAll(".snippet")];
    RESULT.hits.forEach((hit, i) => {
      expect(snippets[i]!.textContent).toBe(hit.snippet);
      expect(snippets[i]!.querySelectorAll("mark").length).toBe(hit.highlights.length);
    });
  });

  it("facet click reports the dimension and value once", () => {
    const { root, view, callbacks } = makeView();
    view.render(RESULT, NO_FILTERS);
    const journalButton = root.querySelector(
      '[data-facet="journal"] .facet-value',
    ) as HTMLButtonElement;
    journalButton.click();
    expect(callbacks.onFacetToggle).toHaveBeenCalledTimes(1);
    expect(callbacks.onFacetToggle).toHaveBeenCalledWith(
      "journal",
      journalButton.dataset.value,
    );
  });

  it("histogram bars are clickable per year", () => {
    const { root, view, callbacks } = makeView();
    view.render(RESULT, NO_FILTERS);
    const bars = [...root.querySelectorAll(".year-bar")] as HTMLButtonElement[];
    expect(bars.length).toBe(Object.keys(RESULT.histogram).length);
    bars[0]!.click();
    expect(callbacks.onYearClick).toHaveBeenCalledWith(Number(bars[0]!.dataset.year));
  });

  it("zero results render the rewrite hint panel", () => {
    const { root, view } = makeView();
    view.render(
      { ...RESULT, total: 0, hits: [], facets: {}, histogram: {}, diagnostics: ["unknown entity: @GENE_X"] },
      NO_FILTERS,
    );
    const zero = root.querySelector(".zero-state")!;
    expect(zero.textContent).toContain("@SEMANTIC_Term");
    expect(zero.textContent).toContain("unknown entity: @GENE_X");
  });

  it("error panel carries the request id", () => {
    const { root, view } = makeView();
    view.renderError("r42", "malformed response payload");
    expect(root.querySelector(".error-panel")!.textContent).toContain("r42");
  });

  it("opening an article goes through the callback, not navigation", () => {
    const { root, view, callbacks } = makeView();
    view.render(RESULT, NO_FILTERS);
    (root.querySelector(".hit .title") as HTMLAnchorElement).click();
    expect(callbacks.onOpenArticle).toHaveBeenCalledWith(RESULT.hits[0]!.pmid);
  });
});
