import { ApiClient } from "./api.js";
import { ArticleView } from "./article.js";
import { AutocompleteBox } from "./autocomplete.js";
import { Collection } from "./collection.js";
import { ResultsView } from "./results.js";
import { decodeState, encodeState, type HighlightMode, type UiSearchState } from "./state.js";

/** Page controller.
 *
 * Owns the view state (always mirrored into the URL, so any view is a
 * stable deep link), issues at most one in-flight search (newer input
 * aborts the previous request), and delegates rendering to the
 * components. Hits are shown exactly as the server returned them.
 */
export class App {
  readonly state: UiSearchState;
  readonly searchBox: AutocompleteBox;
  readonly results: ResultsView;
  readonly article: ArticleView;
  private inflight: AbortController | null = null;
  private requestCounter = 0;

  constructor(
    private readonly win: Window,
    private readonly api: ApiClient,
    roots: { search: HTMLElement; results: HTMLElement; article: HTMLElement },
    autocompleteDebounceMs?: number,
  ) {
    this.state = decodeState(win.location.search);
    this.searchBox = new AutocompleteBox(
      roots.search,
      api,
      (text) => this.newSearch(text),
      autocompleteDebounceMs,
    );
    this.searchBox.setFromQueryText(this.state.query);
    this.results = new ResultsView(roots.results, {
      onFacetToggle: (dimension, value) => this.toggleFacet(dimension, value),
      onYearClick: (year) => this.toggleYear(year),
      onOpenArticle: (pmid) => void this.openArticle(pmid),
    });
    this.article = new ArticleView(roots.article, new Collection(win.localStorage), {
      onHighlightMode: (mode) => void this.setHighlightMode(mode),
    });
  }

  /** Run whatever the URL asked for (deep-link entry point). */
  async start(): Promise<void> {
    if (this.state.query) await this.runSearch();
    if (this.state.article !== null) await this.loadArticle();
  }

  private syncUrl(): void {
    const encoded = encodeState(this.state);
    this.win.history.pushState(null, "", encoded ? `?${encoded}` : this.win.location.pathname);
  }

  newSearch(text: string): Promise<void> {
    this.state.query = text;
    this.state.page = 0;
    this.state.journal = null;
    this.state.section = null;
    this.state.pubType = null;
    this.state.year = null;
    this.syncUrl();
    return this.runSearch();
  }

  toggleFacet(dimension: string, value: string): Promise<void> {
    if (dimension === "journal") {
      this.state.journal = this.state.journal === value ? null : value;
    } else if (dimension === "section") {
      this.state.section = this.state.section === value ? null : value;
    } else if (dimension === "pub_type") {
      this.state.pubType = this.state.pubType === value ? null : value;
    }
    this.state.page = 0;
    this.syncUrl();
    return this.runSearch();
  }

  toggleYear(year: number): Promise<void> {
    this.state.year = this.state.year === year ? null : year;
    this.state.page = 0;
    this.syncUrl();
    return this.runSearch();
  }

  async setHighlightMode(mode: HighlightMode): Promise<void> {
    this.state.highlightMode = mode;
    this.syncUrl();
    if (this.state.article !== null) await this.loadArticle();
  }

  async openArticle(pmid: number): Promise<void> {
    this.state.article = pmid;
    this.syncUrl();
    await this.loadArticle();
  }

  /** One in-flight search at a time; stale responses are dropped. */
  async runSearch(): Promise<void> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const requestId = `r${++this.requestCounter}`;
    try {
      const response = await this.api.search(
        {
          text: this.state.query,
          page: this.state.page,
          journal: this.state.journal ?? undefined,
          section: this.state.section ?? undefined,
          pubType: this.state.pubType ?? undefined,
          year: this.state.year ?? undefined,
        },
        controller.signal,
      );
      if (controller.signal.aborted) return;
      if (!Array.isArray(response.hits) || typeof response.total !== "number") {
        this.results.renderError(requestId, "malformed response payload");
        return;
      }
      this.results.render(response, {
        journal: this.state.journal,
        section: this.state.section,
        pubType: this.state.pubType,
        year: this.state.year,
      });
    } catch (error) {
      if ((error as { name?: string }).name === "AbortError") return;
      this.results.renderError(requestId, (error as Error).message);
    }
  }

  private queryKeys(): string[] {
    return this.state.query.split(/\s+/).filter((token) => token.startsWith("@"));
  }

  async loadArticle(): Promise<void> {
    const pmid = this.state.article;
    if (pmid === null) return;
    try {
      const collection = await this.api.exportArticle(pmid);
      const doc = collection.documents[0];
      if (!doc) throw new Error(`article ${pmid} not in index`);
      this.article.render(doc, this.queryKeys(), this.state.highlightMode);
    } catch {
      this.article.renderError(() => void this.loadArticle());
    }
  }
}

export function mount(win: Window, baseUrl = ""): App {
  const doc = win.document;
  const pick = (id: string): HTMLElement => {
    const el = doc.getElementById(id);
    if (!el) throw new Error(`missing #${id}`);
    return el;
  };
  const app = new App(win, new ApiClient(baseUrl, win.fetch.bind(win)), {
    search: pick("search-box"),
    results: pick("results"),
    article: pick("article"),
  });
  void app.start();
  return app;
}
