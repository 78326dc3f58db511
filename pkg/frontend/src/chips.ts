/** Query-box model: free text interleaved with accepted semantic chips.
 *
 * Picking a suggestion replaces the trailing partial token with a chip
 * carrying the semantic key; deleting a chip restores what the user had
 * typed, so plain keyword search still works after a chip is removed.
 */

export interface Chip {
  kind: "chip";
  key: string;
  label: string;
  rawText: string;
}

export interface TextRun {
  kind: "text";
  text: string;
}

export type Segment = Chip | TextRun;

export class QueryModel {
  segments: Segment[] = [];

  static fromText(text: string): QueryModel {
    const model = new QueryModel();
    if (text) model.segments.push({ kind: "text", text });
    return model;
  }

  /** Raw text of the trailing run, used as the autocomplete prefix. */
  pendingText(): string {
    const last = this.segments[this.segments.length - 1];
    return last && last.kind === "text" ? last.text : "";
  }

  setPendingText(text: string): void {
    const last = this.segments[this.segments.length - 1];
    if (last && last.kind === "text") {
      last.text = text;
    } else if (text) {
      this.segments.push({ kind: "text", text });
    }
  }

  /** Replace the trailing typed token with an accepted semantic chip. */
  acceptSuggestion(key: string, label: string): void {
    const pending = this.pendingText();
    this.segments.pop();
    const keep = pending.replace(/\S*$/, "");
    if (keep.trim()) this.segments.push({ kind: "text", text: keep });
    const replaced = pending.slice(keep.length);
    this.segments.push({ kind: "chip", key, label, rawText: replaced });
    this.segments.push({ kind: "text", text: "" });
  }

  /** Remove a chip, putting its original raw text back in place. */
  removeChip(index: number): void {
    const chip = this.segments[index];
    if (!chip || chip.kind !== "chip") return;
    this.segments[index] = { kind: "text", text: chip.rawText };
    this.normalize();
  }

  private normalize(): void {
    const merged: Segment[] = [];
    for (const segment of this.segments) {
      const last = merged[merged.length - 1];
      if (segment.kind === "text" && last && last.kind === "text") {
        last.text = `${last.text} ${segment.text}`.replace(/\s+/g, " ");
      } else {
        merged.push(segment);
      }
    }
    this.segments = merged;
  }

  /** Query text sent to /search: chips serialize to their semantic keys. */
  toQueryString(): string {
    return this.segments
      .map((s) => (s.kind === "chip" ? s.key : s.text))
      .join(" ")
      .replace(/\s+/g, " ")
      .trim();
  }

  chips(): Chip[] {
    return this.segments.filter((s): s is Chip => s.kind === "chip");
  }
}
