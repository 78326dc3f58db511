/** Wire types for the biolit HTTP API (see docs/api.md in the repo root). */

export interface SearchHit {
  pmid: number;
  tier: number;
  score: number;
  title: string;
  journal: string;
  year: number;
  matched_section: string;
  snippet: string;
  highlights: [number, number][];
}

export interface SearchResponse {
  total: number;
  page: number;
  page_size: number;
  hits: SearchHit[];
  facets: Record<string, Record<string, number>>;
  histogram: Record<string, number>;
  diagnostics: string[];
}

export interface Suggestion {
  name: string;
  semantic_key: string;
  etype: string;
  doc_freq: number;
  matched_synonym: string;
}

export interface BiocLocation {
  offset: number;
  length: number;
}

export interface BiocAnnotation {
  id: string;
  infons: { type: string; identifier: string; semantic_key: string };
  text: string;
  locations: BiocLocation[];
}

export interface BiocPassage {
  infons: { section_type: string };
  offset: number;
  text: string;
  annotations: BiocAnnotation[];
}

export interface BiocRelation {
  id: string;
  infons: {
    type: string;
    entity1: string;
    entity2: string;
    evidence_passages: string;
  };
}

export interface BiocDocument {
  id: string;
  infons: Record<string, string>;
  passages: BiocPassage[];
  relations?: BiocRelation[];
}

export interface BiocCollection {
  source: string;
  key: string;
  documents: BiocDocument[];
}

export interface ApiErrorBody {
  error: { code: string; message: string; position?: number };
}
