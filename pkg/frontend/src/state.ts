/** View state, fully encoded in the URL so deep links reproduce a view. */

export type HighlightMode = "query-entities" | "all-entities" | "off";

export interface UiSearchState {
  query: string;
  journal: string | null;
  section: string | null;
  pubType: string | null;
  year: number | null;
  page: number;
  article: number | null;
  highlightMode: HighlightMode;
}

export const EMPTY_STATE: UiSearchState = {
  query: "",
  journal: null,
  section: null,
  pubType: null,
  year: null,
  page: 0,
  article: null,
  highlightMode: "query-entities",
};

const HIGHLIGHT_MODES: HighlightMode[] = ["query-entities", "all-entities", "off"];

export function encodeState(state: UiSearchState): string {
  const params = new URLSearchParams();
  if (state.query) params.set("q", state.query);
  if (state.journal) params.set("journal", state.journal);
  if (state.section) params.set("section", state.section);
  if (state.pubType) params.set("type", state.pubType);
  if (state.year !== null) params.set("year", String(state.year));
  if (state.page > 0) params.set("page", String(state.page));
  if (state.article !== null) params.set("pmid", String(state.article));
  if (state.highlightMode !== "query-entities") params.set("hl", state.highlightMode);
  return params.toString();
}

export function decodeState(search: string): UiSearchState {
  const params = new URLSearchParams(search);
  const year = params.get("year");
  const page = params.get("page");
  const pmid = params.get("pmid");
  const hl = params.get("hl") as HighlightMode | null;
  return {
    query: params.get("q") ?? "",
    journal: params.get("journal"),
    section: params.get("section"),
    pubType: params.get("type"),
    year: year !== null && /^\d+$/.test(year) ? Number(year) : null,
    page: page !== null && /^\d+$/.test(page) ? Number(page) : 0,
    article: pmid !== null && /^\d+$/.test(pmid) ? Number(pmid) : null,
    highlightMode: hl !== null && HIGHLIGHT_MODES.includes(hl) ? hl : "query-entities",
  };
}
