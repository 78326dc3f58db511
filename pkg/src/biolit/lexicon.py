"""Entity lexicon: surface forms, synonym groups, and mention lookup.

File format is TSV, one surface form per line::

    surface<TAB>etype<TAB>namespace:id<TAB>preferred_name

Lines whose surface equals the preferred name define the group's display
form; every preferred name must appear as a surface of its own group.
Lookups are case-folded and punctuation-normalized, so ``paraoxonase 1``
and ``Paraoxonase-1`` reach the same group.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .docmodel import (
    EntityType,
    Identifier,
    check_identifier,
    make_semantic_key,
)
from .errors import LexiconError
from .text import fold_term


@dataclass(frozen=True)
class LexiconEntry:
    surface: str
    etype: EntityType
    identifier: Identifier
    preferred_name: str

    @property
    def semantic_key(self) -> str:
        return make_semantic_key(self.etype, self.preferred_name)


@dataclass
class Lexicon:
    entries: list[LexiconEntry] = field(default_factory=list)
    # (folded surface, etype) -> entry
    _by_surface: dict[tuple[str, EntityType], LexiconEntry] = field(
        default_factory=dict, repr=False
    )
    # identifier string -> all surfaces of the synonym group
    _groups: dict[str, list[LexiconEntry]] = field(default_factory=dict, repr=False)

    def add(self, entry: LexiconEntry) -> None:
        check_identifier(entry.etype, entry.identifier)
        folded = fold_term(entry.surface)
        if not folded:
            raise LexiconError(f"surface {entry.surface!r} folds to nothing")
        key = (folded, entry.etype)
        existing = self._by_surface.get(key)
        if existing is not None:
            if existing.identifier != entry.identifier:
                raise LexiconError(
                    f"surface {entry.surface!r} is ambiguous within type"
                    f" {entry.etype.value}: {existing.identifier} vs {entry.identifier}"
                )
            return
        self.entries.append(entry)
        self._by_surface[key] = entry
        self._groups.setdefault(str(entry.identifier), []).append(entry)

    def finalize(self) -> None:
        for ident, group in self._groups.items():
            names = {g.preferred_name for g in group}
            if len(names) != 1:
                raise LexiconError(
                    f"group {ident} has conflicting preferred names: {sorted(names)}"
                )
            preferred = next(iter(names))
            if fold_term(preferred) not in {fold_term(g.surface) for g in group}:
                raise LexiconError(
                    f"preferred name {preferred!r} is not a surface of group {ident}"
                )

    def lookup(
        self, mention: str, etype: EntityType | None = None
    ) -> LexiconEntry | None:
        """Resolve a mention; with no type given, type priority decides."""
        folded = fold_term(mention)
        if etype is not None:
            return self._by_surface.get((folded, etype))
        from .docmodel import TYPE_PRIORITY

        for t in TYPE_PRIORITY:
            entry = self._by_surface.get((folded, t))
            if entry is not None:
                return entry
        return None

    def synonyms(self, identifier: Identifier) -> list[str]:
        return [e.surface for e in self._groups.get(str(identifier), [])]

    def surface_token_lists(self) -> list[tuple[tuple[str, ...], LexiconEntry]]:
        """Folded sub-token sequences for every surface, longest first."""
        out = []
        for entry in self.entries:
            toks = tuple(fold_term(entry.surface).split())
            out.append((toks, entry))
        out.sort(key=lambda pair: -len(pair[0]))
        return out


def normalize_mention(
    mention: str, etype: EntityType, lex: Lexicon
) -> tuple[Identifier, str] | None:
    """(identifier, semantic key) for a mention, or None when unknown."""
    entry = lex.lookup(mention, etype)
    if entry is None:
        return None
    return entry.identifier, entry.semantic_key


def parse_lexicon(text: str) -> Lexicon:
    lex = Lexicon()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise LexiconError(f"line {lineno}: expected 4 tab-separated fields")
        surface, etype_name, ident_text, preferred = parts
        try:
            etype = EntityType(etype_name)
        except ValueError:
            raise LexiconError(f"line {lineno}: unknown entity type {etype_name!r}") from None
        lex.add(LexiconEntry(surface, etype, Identifier.parse(ident_text), preferred))
    lex.finalize()
    return lex


def load_lexicon(path: str) -> Lexicon:
    with open(path, encoding="utf-8") as fh:
        return parse_lexicon(fh.read())
