import type { BiocCollection, SearchResponse, Suggestion } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

export interface SearchParams {
  text: string;
  page?: number;
  pageSize?: number;
  journal?: string;
  section?: string;
  pubType?: string;
  year?: number;
}

/** Thin typed client over the service endpoints; search calls accept an
 * AbortSignal so the app can cancel a stale request when input changes. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, signal?: AbortSignal): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, { signal });
    const body = (await response.json()) as unknown;
    if (!response.ok) {
      const err = body as { error?: { code?: string; message?: string } };
      throw new ApiError(
        err.error?.code ?? "UNKNOWN",
        err.error?.message ?? `request failed (${response.status})`,
        response.status,
      );
    }
    return body as T;
  }

  search(params: SearchParams, signal?: AbortSignal): Promise<SearchResponse> {
    const query = new URLSearchParams({ text: params.text });
    if (params.page) query.set("page", String(params.page));
    if (params.pageSize) query.set("page_size", String(params.pageSize));
    if (params.journal) query.set("filter_journal", params.journal);
    if (params.section) query.set("filter_section", params.section);
    if (params.pubType) query.set("filter_type", params.pubType);
    if (params.year !== undefined) query.set("filter_year", String(params.year));
    return this.request(`/search?${query}`, signal);
  }

  autocomplete(text: string, limit = 8, signal?: AbortSignal): Promise<Suggestion[]> {
    const query = new URLSearchParams({ query: text, limit: String(limit) });
    return this.request(`/entity/autocomplete?${query}`, signal);
  }

  exportArticle(pmid: number, signal?: AbortSignal): Promise<BiocCollection> {
    const query = new URLSearchParams({ pmids: String(pmid), format: "biocjson" });
    return this.request(`/publications/export?${query}`, signal);
  }
}
