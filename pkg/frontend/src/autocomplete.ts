import { ApiClient } from "./api.js";
import { QueryModel } from "./chips.js";
import { debounce } from "./debounce.js";
import type { Suggestion } from "./types.js";

export const AUTOCOMPLETE_DEBOUNCE_MS = 200;

/** Search box with chips and a suggestion dropdown.
 *
 * Keystrokes trigger debounced /entity/autocomplete calls; picking a
 * suggestion swaps the typed token for a semantic-term chip. A failed
 * lookup shows a non-blocking notice and leaves the typed text alone.
 */
export class AutocompleteBox {
  readonly model = new QueryModel();
  private readonly input: HTMLInputElement;
  private readonly chipBar: HTMLElement;
  private readonly dropdown: HTMLElement;
  private readonly notice: HTMLElement;
  private readonly lookup: (text: string) => void;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly onSubmit: (queryText: string) => void,
    debounceMs: number = AUTOCOMPLETE_DEBOUNCE_MS,
  ) {
    const doc = root.ownerDocument;
    this.chipBar = doc.createElement("div");
    this.chipBar.className = "chip-bar";
    this.input = doc.createElement("input");
    this.input.type = "search";
    this.input.placeholder = "keywords, @SEMANTIC_Terms, relations:…";
    this.dropdown = doc.createElement("ul");
    this.dropdown.className = "suggestions";
    this.dropdown.hidden = true;
    this.notice = doc.createElement("div");
    this.notice.className = "notice";
    this.notice.hidden = true;
    root.append(this.chipBar, this.input, this.dropdown, this.notice);

    this.lookup = debounce((text: string) => void this.fetchSuggestions(text), debounceMs);
    this.input.addEventListener("input", () => {
      this.model.setPendingText(this.input.value);
      const token = this.currentToken();
      if (token.length >= 2) {
        this.lookup(token);
      } else {
        this.hideDropdown();
      }
    });
    this.input.addEventListener("keydown", (event) => {
      if (event.key === "Enter") {
        this.hideDropdown();
        this.onSubmit(this.queryText());
      } else if (event.key === "Escape") {
        this.hideDropdown();
      }
    });
  }

  queryText(): string {
    this.model.setPendingText(this.input.value);
    return this.model.toQueryString();
  }

  /** Seed the box from a deep link: semantic keys become chips. */
  setFromQueryText(text: string): void {
    this.model.segments = [];
    for (const token of text.split(/\s+/).filter(Boolean)) {
      if (token.startsWith("@")) {
        this.model.segments.push({ kind: "chip", key: token, label: token, rawText: token });
      } else {
        this.model.setPendingText(`${this.model.pendingText()} ${token}`.trim());
        if (this.model.pendingText() && this.model.segments.length === 0) {
          this.model.segments.push({ kind: "text", text: this.model.pendingText() });
        }
      }
    }
    this.input.value = this.model.pendingText();
    this.renderChips();
  }

  private currentToken(): string {
    const match = this.input.value.match(/(\S+)$/);
    return match?.[1] ?? "";
  }

  private async fetchSuggestions(token: string): Promise<void> {
    try {
      const suggestions = await this.api.autocomplete(token);
      this.notice.hidden = true;
      this.renderDropdown(suggestions);
    } catch {
      // non-blocking: keep the raw text, just tell the user
      this.hideDropdown();
      this.notice.textContent = "Suggestions unavailable — searching by keyword.";
      this.notice.hidden = false;
    }
  }

  private renderDropdown(suggestions: Suggestion[]): void {
    this.dropdown.textContent = "";
    if (suggestions.length === 0) {
      this.hideDropdown();
      return;
    }
    const doc = this.root.ownerDocument;
    for (const suggestion of suggestions) {
      const item = doc.createElement("li");
      item.className = "suggestion";
      item.dataset.key = suggestion.semantic_key;
      item.textContent = `${suggestion.name} — ${suggestion.semantic_key} (${suggestion.doc_freq})`;
      item.addEventListener("mousedown", (event) => {
        event.preventDefault();
        this.accept(suggestion);
      });
      this.dropdown.appendChild(item);
    }
    this.dropdown.hidden = false;
  }

  private accept(suggestion: Suggestion): void {
    this.model.setPendingText(this.input.value);
    this.model.acceptSuggestion(suggestion.semantic_key, suggestion.name);
    this.input.value = this.model.pendingText();
    this.renderChips();
    this.hideDropdown();
  }

  private renderChips(): void {
    this.chipBar.textContent = "";
    const doc = this.root.ownerDocument;
    this.model.segments.forEach((segmentValue, index) => {
      if (segmentValue.kind !== "chip") return;
      const chip = doc.createElement("span");
      chip.className = "chip";
      chip.dataset.key = segmentValue.key;
      chip.textContent = segmentValue.key;
      const remove = doc.createElement("button");
      remove.textContent = "×";
      remove.title = "remove; keeps the typed text";
      remove.addEventListener("click", () => {
        this.model.removeChip(index);
        this.input.value = this.model.pendingText();
        this.renderChips();
      });
      chip.appendChild(remove);
      this.chipBar.appendChild(chip);
    });
  }

  private hideDropdown(): void {
    this.dropdown.hidden = true;
    this.dropdown.textContent = "";
  }
}
