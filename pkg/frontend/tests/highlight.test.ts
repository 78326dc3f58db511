import { describe, expect, it } from "vitest";

import { renderRuns, segment } from "../src/highlight.js";

const TEXT = "Serum PON1 activity declined in patients with COVID-19.";

describe("highlight segmentation", () => {
  it("marks exactly the given spans", () => {
    const runs = segment(TEXT, [
      { start: 6, length: 4, key: "@GENE_PON1" },
      { start: 46, length: 8, key: "@DISEASE_COVID_19" },
    ]);
    const marked = runs.filter((r) => r.mark).map((r) => r.text);
    expect(marked).toEqual(["PON1", "COVID-19"]);
    expect(runs.map((r) => r.text).join("")).toBe(TEXT);
  });

  it("empty spans produce one plain run", () => {
    expect(segment(TEXT, [])).toEqual([{ text: TEXT, mark: false }]);
  });

  it("drops out-of-range spans", () => {
    const runs = segment(TEXT, [{ start: 100, length: 10 }, { start: -4, length: 2 }]);
    expect(runs).toEqual([{ text: TEXT, mark: false }]);
  });

  it("render keeps text content identical", () => {
    const container = document.createElement("p");
    renderRuns(document, container, segment(TEXT, [{ start: 6, length: 4, cls: "ent" }]));
    expect(container.textContent).toBe(TEXT);
    expect(container.querySelectorAll("mark").length).toBe(1);
  });
});
