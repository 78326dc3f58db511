import { entityClass } from "./colors.js";
import { Collection } from "./collection.js";
import { renderRuns, segment, type Span } from "./highlight.js";
import type { HighlightMode } from "./state.js";
import type { BiocAnnotation, BiocDocument } from "./types.js";

export interface ArticleCallbacks {
  onHighlightMode: (mode: HighlightMode) => void;
}

const MODES: HighlightMode[] = ["query-entities", "all-entities", "off"];

/** Annotated article pane: colored entity marks with a three-state
 * highlight toggle, an entities/relations side list that scrolls to
 * in-text evidence, and an add-to-collection button. Mark toggling only
 * swaps inline <mark> elements, so the text content never reflows. */
export class ArticleView {
  private doc: BiocDocument | null = null;
  private queryKeys: Set<string> = new Set();
  private mode: HighlightMode = "query-entities";

  constructor(
    private readonly root: HTMLElement,
    private readonly collection: Collection,
    private readonly callbacks: ArticleCallbacks,
  ) {}

  render(article: BiocDocument, queryKeys: string[], mode: HighlightMode): void {
    this.doc = article;
    this.queryKeys = new Set(queryKeys);
    this.mode = mode;
    this.root.textContent = "";
    const doc = this.root.ownerDocument;

    const toolbar = doc.createElement("div");
    toolbar.className = "article-toolbar";
    for (const candidate of MODES) {
      const button = doc.createElement("button");
      button.className = "hl-mode" + (candidate === mode ? " active" : "");
      button.dataset.mode = candidate;
      button.textContent = candidate;
      button.addEventListener("click", () => this.callbacks.onHighlightMode(candidate));
      toolbar.appendChild(button);
    }
    const save = doc.createElement("button");
    save.className = "save";
    const pmid = Number(article.id);
    const label = () =>
      this.collection.has(pmid) ? "In collection ✓" : "Add to collection";
    save.textContent = label();
    save.addEventListener("click", () => {
      this.collection.add(pmid);
      save.textContent = label();
    });
    toolbar.appendChild(save);
    this.root.appendChild(toolbar);

    const body = doc.createElement("div");
    body.className = "article-body";
    article.passages.forEach((passage, passageIndex) => {
      const block = doc.createElement("p");
      block.className = `passage passage-${passage.infons.section_type}`;
      block.dataset.passage = String(passageIndex);
      const spans = this.visibleSpans(passage.annotations, passage.offset);
      renderRuns(doc, block, segment(passage.text, spans));
      body.appendChild(block);
    });
    this.root.appendChild(body);
    this.root.appendChild(this.renderSideList(doc, article));
  }

  renderError(retry: () => void): void {
    this.root.textContent = "";
    const doc = this.root.ownerDocument;
    const panel = doc.createElement("div");
    panel.className = "error-panel";
    panel.textContent = "Could not load the article. ";
    const button = doc.createElement("button");
    button.className = "retry";
    button.textContent = "Retry";
    button.addEventListener("click", retry);
    panel.appendChild(button);
    this.root.appendChild(panel);
  }

  private visibleSpans(annotations: BiocAnnotation[], passageOffset: number): Span[] {
    if (this.mode === "off") return [];
    const spans: Span[] = [];
    for (const ann of annotations) {
      const key = ann.infons.semantic_key;
      if (this.mode === "query-entities" && !this.queryKeys.has(key)) continue;
      const location = ann.locations[0];
      if (!location) continue;
      spans.push({
        start: location.offset - passageOffset,
        length: location.length,
        cls: entityClass(ann.infons.type),
        key,
      });
    }
    return spans;
  }

  private renderSideList(doc: Document, article: BiocDocument): HTMLElement {
    const aside = doc.createElement("aside");
    aside.className = "article-side";
    const entityHeading = doc.createElement("h3");
    entityHeading.textContent = "Entities";
    aside.appendChild(entityHeading);
    const seen = new Map<string, BiocAnnotation>();
    article.passages.forEach((passage) => {
      for (const ann of passage.annotations) {
        if (!seen.has(ann.infons.semantic_key)) seen.set(ann.infons.semantic_key, ann);
      }
    });
    const entityList = doc.createElement("ul");
    entityList.className = "entity-list";
    for (const [key, ann] of seen) {
      const item = doc.createElement("li");
      const link = doc.createElement("a");
      link.href = "#";
      link.className = entityClass(ann.infons.type);
      link.dataset.key = key;
      link.textContent = `${key} (${ann.infons.identifier})`;
      link.addEventListener("click", (event) => {
        event.preventDefault();
        this.scrollToKey(key);
      });
      item.appendChild(link);
      entityList.appendChild(item);
    }
    aside.appendChild(entityList);

    const relationHeading = doc.createElement("h3");
    relationHeading.textContent = "Relations";
    aside.appendChild(relationHeading);
    const relationList = doc.createElement("ul");
    relationList.className = "relation-list";
    for (const relation of article.relations ?? []) {
      const item = doc.createElement("li");
      const link = doc.createElement("a");
      link.href = "#";
      link.className = "relation";
      link.dataset.relation = relation.id;
      link.textContent = `${relation.infons.entity1} —${relation.infons.type}→ ${relation.infons.entity2}`;
      link.addEventListener("click", (event) => {
        event.preventDefault();
        this.scrollToEvidence(relation.infons.entity1, relation.infons.evidence_passages);
      });
      item.appendChild(link);
      relationList.appendChild(item);
    }
    aside.appendChild(relationList);
    return aside;
  }

  /** Scroll to the first in-text mark for a key (any passage). */
  private scrollToKey(key: string): void {
    const mark = this.root.querySelector<HTMLElement>(`mark[data-key="${key}"]`);
    mark?.scrollIntoView({ block: "center" });
    mark?.classList.add("flash");
  }

  /** Scroll to a relation's evidence: its first endpoint inside the
   * first evidence passage. */
  private scrollToEvidence(entity1: string, evidencePassages: string): void {
    const first = evidencePassages.split(",").filter(Boolean)[0];
    const scope =
      first !== undefined
        ? this.root.querySelector(`[data-passage="${first}"]`)
        : this.root;
    const mark =
      scope?.querySelector<HTMLElement>(`mark[data-key="${entity1}"]`) ??
      this.root.querySelector<HTMLElement>(`mark[data-key="${entity1}"]`);
    mark?.scrollIntoView({ block: "center" });
    mark?.classList.add("flash");
  }
}
