/** Fixed entity-type palette; class names match styles in index.html. */

export const ENTITY_COLORS: Record<string, string> = {
  Gene: "#7c4dbe",
  Disease: "#d1495b",
  Chemical: "#1b7f6b",
  Variant: "#b8860b",
  Species: "#2a6f97",
  CellLine: "#8a5a44",
};

export function entityClass(etype: string): string {
  return `ent ent-${etype.toLowerCase()}`;
}
