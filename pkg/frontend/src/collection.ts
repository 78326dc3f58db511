/** Client-side article collection, persisted in browser local storage. */

const STORAGE_KEY = "biolit.collection";

export class Collection {
  constructor(private readonly storage: Storage) {}

  list(): number[] {
    const raw = this.storage.getItem(STORAGE_KEY);
    if (!raw) return [];
    try {
      const parsed = JSON.parse(raw) as unknown;
      return Array.isArray(parsed) ? parsed.filter((p) => Number.isInteger(p)) : [];
    } catch {
      return [];
    }
  }

  /** Adding an already-saved article is a no-op. */
  add(pmid: number): void {
    const pmids = this.list();
    if (!pmids.includes(pmid)) {
      pmids.push(pmid);
      this.storage.setItem(STORAGE_KEY, JSON.stringify(pmids));
    }
  }

  remove(pmid: number): void {
    const pmids = this.list().filter((p) => p !== pmid);
    this.storage.setItem(STORAGE_KEY, JSON.stringify(pmids));
  }

  has(pmid: number): boolean {
    return this.list().includes(pmid);
  }
}
