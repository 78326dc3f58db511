"""Parenthetical abbreviation detection.

Finds ``long form (SF)`` definitions by aligning the short form right to
left against the text preceding the parenthesis: every short-form
character must match a character of the long form, and the first one must
match at a word start.  Long forms that end up with an unbalanced ``)``
are extended left through the matching ``(`` and the preceding word, so
``chemokine (C-C motif) ligand 2 (CCL2)`` resolves to the full phrase.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .docmodel import Document

PAREN_RE = re.compile(r"\(([^()]{1,18})\)")

MIN_SHORT = 2
MAX_SHORT = 10


@dataclass(frozen=True)
class AbbrevPair:
    short_form: str
    long_form: str
    passage_index: int
    confidence: float


def _is_candidate_short_form(sf: str) -> bool:
    if not (MIN_SHORT <= len(sf) <= MAX_SHORT):
        return False
    if len(sf.split()) > 2:
        return False
    if not any(c.isalpha() for c in sf):
        return False
    return sf[0].isalnum()


def _word_start(text: str, i: int) -> bool:
    return i == 0 or not text[i - 1].isalnum()


def _align(short: str, candidate: str) -> tuple[int, float] | None:
    """Start index of the long form in ``candidate``, plus confidence."""
    chars = [c for c in short.lower() if c.isalnum()]
    if not chars:
        return None
    li = len(candidate) - 1
    starts = 0
    for si in range(len(chars) - 1, -1, -1):
        c = chars[si]
        while li >= 0:
            ok = candidate[li].lower() == c
            if ok and si == 0 and not _word_start(candidate, li):
                ok = False
            if ok:
                break
            li -= 1
        if li < 0:
            return None
        if _word_start(candidate, li):
            starts += 1
        li -= 1
    start = li + 1
    return start, starts / len(chars)


def _rebalance(candidate: str, start: int) -> int:
    """Extend left until parentheses inside the long form balance."""
    while True:
        segment = candidate[start:]
        depth = 0
        unmatched = 0
        for ch in segment:
            if ch == "(":
                depth += 1
            elif ch == ")":
                if depth:
                    depth -= 1
                else:
                    unmatched += 1
        if not unmatched:
            return start
        open_idx = candidate.rfind("(", 0, start)
        if open_idx < 0:
            return start
        # step over the '(' and the word before it
        i = open_idx - 1
        while i >= 0 and candidate[i].isspace():
            i -= 1
        while i >= 0 and not candidate[i].isspace():
            i -= 1
        start = i + 1


def detect_abbreviations(doc: Document) -> list[AbbrevPair]:
    """All (short form, long form) definitions, in document order."""
    pairs: list[AbbrevPair] = []
    for pidx, passage in enumerate(doc.passages):
        text = passage.text
        for m in PAREN_RE.finditer(text):
            sf = m.group(1).strip()
            if not _is_candidate_short_form(sf):
                continue
            candidate = text[: m.start()].rstrip()
            if not candidate:
                continue
            aligned = _align(sf, candidate)
            if aligned is None:
                continue
            start, confidence = aligned
            start = _rebalance(candidate, start)
            long_form = candidate[start:].strip()
            if len(sf) >= len(long_form):
                continue
            max_words = min(len(sf) + 5, len(sf) * 2)
            if len(long_form.split()) > max_words:
                continue
            pairs.append(AbbrevPair(sf, long_form, pidx, confidence))
    return pairs
