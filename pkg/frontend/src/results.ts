import { renderRuns, segment } from "./highlight.js";
import type { SearchResponse } from "./types.js";

export interface ResultsCallbacks {
  onFacetToggle: (dimension: string, value: string) => void;
  onYearClick: (year: number) => void;
  onOpenArticle: (pmid: number) => void;
}

const TIER_LABELS: Record<number, string> = {
  3: "relation",
  2: "same sentence",
  1: "same article",
  0: "keyword",
};

/** Renders hits exactly in server order plus facet panel and histogram.
 * The view never re-sorts or filters client-side; facet and histogram
 * clicks hand control back so the app can issue one re-query. */
export class ResultsView {
  constructor(
    private readonly root: HTMLElement,
    private readonly callbacks: ResultsCallbacks,
  ) {}

  render(
    result: SearchResponse,
    active: { journal: string | null; section: string | null; pubType: string | null; year: number | null },
  ): void {
    const doc = this.root.ownerDocument;
    this.root.textContent = "";
    const summary = doc.createElement("p");
    summary.className = "total";
    summary.textContent = `${result.total} result${result.total === 1 ? "" : "s"}`;
    this.root.appendChild(summary);

    if (result.total === 0) {
      const zero = doc.createElement("div");
      zero.className = "zero-state";
      const hint = doc.createElement("p");
      hint.textContent =
        "No matches. Try picking a suggested @SEMANTIC_Term from the search box — " +
        "synonyms like “SARS-CoV-2 infection” and “COVID-19” map to one term.";
      zero.appendChild(hint);
      for (const diagnostic of result.diagnostics) {
        const line = doc.createElement("p");
        line.className = "diagnostic";
        line.textContent = diagnostic;
        zero.appendChild(line);
      }
      this.root.appendChild(zero);
      return;
    }

    const layout = doc.createElement("div");
    layout.className = "results-layout";
    layout.append(
      this.renderFacets(doc, result, active),
      this.renderHits(doc, result),
      this.renderHistogram(doc, result, active.year),
    );
    this.root.appendChild(layout);
  }

  renderError(requestId: string, message: string): void {
    const doc = this.root.ownerDocument;
    this.root.textContent = "";
    const panel = doc.createElement("div");
    panel.className = "error-panel";
    panel.textContent = `Search failed (request ${requestId}): ${message}`;
    this.root.appendChild(panel);
  }

  private renderHits(doc: Document, result: SearchResponse): HTMLElement {
    const list = doc.createElement("ol");
    list.className = "hits";
    for (const hit of result.hits) {
      const item = doc.createElement("li");
      item.className = "hit";
      item.dataset.pmid = String(hit.pmid);

      const badge = doc.createElement("span");
      badge.className = `tier tier-${hit.tier}`;
      badge.textContent = TIER_LABELS[hit.tier] ?? String(hit.tier);

      const title = doc.createElement("a");
      title.className = "title";
      title.href = `?pmid=${hit.pmid}`;
      title.textContent = hit.title;
      title.addEventListener("click", (event) => {
        event.preventDefault();
        this.callbacks.onOpenArticle(hit.pmid);
      });

      const meta = doc.createElement("span");
      meta.className = "meta";
      meta.textContent = `${hit.journal} · ${hit.year} · PMID ${hit.pmid}`;

      const snippet = doc.createElement("p");
      snippet.className = "snippet";
      renderRuns(
        doc,
        snippet,
        segment(
          hit.snippet,
          hit.highlights.map(([start, length]) => ({ start, length })),
        ),
      );

      item.append(badge, title, meta, snippet);
      list.appendChild(item);
    }
    return list;
  }

  private renderFacets(
    doc: Document,
    result: SearchResponse,
    active: { journal: string | null; section: string | null; pubType: string | null },
  ): HTMLElement {
    const panel = doc.createElement("aside");
    panel.className = "facets";
    const dimensions: [string, string | null][] = [
      ["journal", active.journal],
      ["section", active.section],
      ["pub_type", active.pubType],
    ];
    for (const [dimension, activeValue] of dimensions) {
      const group = doc.createElement("section");
      group.dataset.facet = dimension;
      const heading = doc.createElement("h3");
      heading.textContent = dimension.replace("_", " ");
      group.appendChild(heading);
      const values = result.facets[dimension] ?? {};
      for (const [value, count] of Object.entries(values)) {
        const row = doc.createElement("button");
        row.className = "facet-value" + (value === activeValue ? " active" : "");
        row.dataset.value = value;
        row.textContent = `${value} (${count})`;
        row.addEventListener("click", () => this.callbacks.onFacetToggle(dimension, value));
        group.appendChild(row);
      }
      panel.appendChild(group);
    }
    return panel;
  }

  private renderHistogram(
    doc: Document,
    result: SearchResponse,
    activeYear: number | null,
  ): HTMLElement {
    const wrap = doc.createElement("div");
    wrap.className = "histogram";
    const counts = Object.entries(result.histogram)
      .map(([year, count]) => [Number(year), count] as [number, number])
      .sort((a, b) => a[0] - b[0]);
    const max = counts.reduce((m, [, count]) => Math.max(m, count), 1);
    for (const [year, count] of counts) {
      const bar = doc.createElement("button");
      bar.className = "year-bar" + (year === activeYear ? " active" : "");
      bar.dataset.year = String(year);
      bar.style.height = `${Math.round((count / max) * 100)}%`;
      bar.title = `${year}: ${count}`;
      bar.addEventListener("click", () => this.callbacks.onYearClick(year));
      wrap.appendChild(bar);
    }
    return wrap;
  }
}
