"""Tokenization and sentence splitting.

Both the tagger and the ranker need the exact same notion of a token and
a sentence, so the rules live here:

* a token is a maximal run of letters/digits, with hyphens joining
  alphanumeric runs into one token ("SARS-CoV-2" is a single token);
* sentences split on ``.?!`` followed by whitespace and an uppercase
  letter or digit, except after a blocklisted abbreviation.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*", re.UNICODE)

SENTENCE_BREAK_RE = re.compile(r"[.?!]+(?=\s+[A-Z0-9])")

# Tokens that end with a period without ending the sentence.
ABBREV_BLOCKLIST = frozenset({"e.g", "i.e", "fig", "vs"})

STOPWORDS = frozenset(
    """a an and are as at be but by for from has have in into is it its of on
    or that the their these this to was were which with""".split()
)


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int

    @property
    def folded(self) -> str:
        return fold_token(self.text)


def fold_token(text: str) -> str:
    """Case-fold and strip accents so "Café" and "cafe" compare equal."""
    text = unicodedata.normalize("NFKD", text.casefold())
    return "".join(c for c in text if not unicodedata.combining(c))


def tokenize(text: str) -> list[Token]:
    return [Token(m.group(0), m.start(), m.end()) for m in TOKEN_RE.finditer(text)]


def subtokens(token_text: str) -> list[str]:
    """Hyphen-separated alphanumeric parts of one token, folded."""
    return [fold_token(part) for part in token_text.split("-") if part]


def fold_term(text: str) -> str:
    """Punctuation-normalized lookup key: lowercase words joined by spaces.

    "SARS-CoV-2 infection" and "sars cov 2 infection" fold identically.
    """
    parts: list[str] = []
    for tok in tokenize(text):
        parts.extend(subtokens(tok.text))
    return " ".join(parts)


def split_sentences(text: str) -> list[tuple[int, int]]:
    """(start, end) character spans of the sentences in ``text``."""
    if not text.strip():
        return []
    breaks = []
    for m in SENTENCE_BREAK_RE.finditer(text):
        prefix = text[: m.start()].rstrip(".")
        last_word = re.split(r"\s+", prefix)[-1].lower() if prefix else ""
        if last_word in ABBREV_BLOCKLIST:
            continue
        breaks.append(m.end())
    spans = []
    start = 0
    for b in breaks:
        end = b
        spans.append((start, end))
        while end < len(text) and text[end].isspace():
            end += 1
        start = end
    if start < len(text):
        spans.append((start, len(text)))
    # trim leading/trailing whitespace inside each span
    out = []
    for s, e in spans:
        while s < e and text[s].isspace():
            s += 1
        while e > s and text[e - 1].isspace():
            e -= 1
        if s < e:
            out.append((s, e))
    return out


def sentence_index(spans: list[tuple[int, int]], pos: int) -> int:
    """Index of the sentence containing character position ``pos``.

    Positions in inter-sentence gaps attach to the preceding sentence.
    """
    for i, (s, e) in enumerate(spans):
        if pos < s:
            return max(0, i - 1)
        if pos < e:
            return i
    return len(spans) - 1 if spans else 0
