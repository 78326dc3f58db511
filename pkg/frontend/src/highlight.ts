/** Pure text segmentation for highlight rendering.
 *
 * Splits a string into plain and marked runs from [start, length] spans.
 * Rendering marks as inline elements keeps the concatenated text content
 * identical to the input, so toggling highlights never reflows the text.
 */

export interface Span {
  start: number;
  length: number;
  cls?: string;
  key?: string;
}

export interface Run {
  text: string;
  mark: boolean;
  cls?: string;
  key?: string;
}

export function segment(text: string, spans: Span[]): Run[] {
  const sorted = [...spans]
    .filter((s) => s.start >= 0 && s.length > 0 && s.start + s.length <= text.length)
    .sort((a, b) => a.start - b.start || a.length - b.length);
  const runs: Run[] = [];
  let pos = 0;
  for (const span of sorted) {
    if (span.start < pos) continue; // drop overlaps; spans come pre-merged
    if (span.start > pos) runs.push({ text: text.slice(pos, span.start), mark: false });
    runs.push({
      text: text.slice(span.start, span.start + span.length),
      mark: true,
      cls: span.cls,
      key: span.key,
    });
    pos = span.start + span.length;
  }
  if (pos < text.length) runs.push({ text: text.slice(pos), mark: false });
  return runs;
}

/** Render runs into a container as text nodes and <mark> elements. */
export function renderRuns(doc: Document, container: HTMLElement, runs: Run[]): void {
  container.textContent = "";
  for (const run of runs) {
    if (!run.mark) {
      container.appendChild(doc.createTextNode(run.text));
      continue;
    }
    const mark = doc.createElement("mark");
    mark.textContent = run.text;
    if (run.cls) mark.className = run.cls;
    if (run.key) mark.dataset.key = run.key;
    container.appendChild(mark);
  }
}
