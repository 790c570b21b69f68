"""Title normalization: raw strings to canonical token sequences.

Every other part of the library works on ``TokenSeq`` values, so word-level
containment is well-defined and insensitive to case and punctuation.
"""
from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DataFormatError

# A normalized title: ordered, non-empty, lowercase, whitespace-free tokens.
TokenSeq = tuple[str, ...]

# \w covers Unicode letters and digits plus underscore; folding the
# underscore into the separator class leaves exactly letters and digits.
_SEPARATORS = re.compile(r"[\W_]+", re.UNICODE)


def normalize(raw: str) -> TokenSeq:
    """Normalize a raw title string into a TokenSeq.

    Lowercases, replaces every non-alphanumeric character with a space and
    splits on whitespace. Digits are kept ("2nd line support" keeps "2nd");
    there is no stemming and no stop-word removal. Deterministic, and
    idempotent on its own space-joined output. May return an empty tuple;
    callers decide whether that is an error.
    """
    return tuple(_SEPARATORS.sub(" ", raw.lower()).split())


def join(tokens: TokenSeq) -> str:
    """Render a TokenSeq as a plain space-joined string."""
    return " ".join(tokens)


def _iter_lines(path: str | Path) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            yield lineno, line.rstrip("\n")


def read_title_file(path: str | Path) -> list[TokenSeq]:
    """Read a newline-delimited corpus file, one raw title per line.

    Whitespace-only lines are skipped. A line with visible content that
    normalizes to nothing (e.g. "***") is a data error naming the line.
    """
    titles = []
    for lineno, line in _iter_lines(path):
        if not line.strip():
            continue
        tokens = normalize(line)
        if not tokens:
            raise DataFormatError(
                f"{path}:{lineno}: title normalizes to an empty token sequence: {line!r}"
            )
        titles.append(tokens)
    return titles


def read_counted_title_file(path: str | Path) -> list[tuple[TokenSeq, int]]:
    """Read a pre-aggregated TSV corpus file: ``raw_title<TAB>count`` per line.

    Counts for duplicate normalized titles merge additively downstream, so
    sharded inputs can simply be concatenated. The split is on the last tab,
    which tolerates raw titles that themselves contain tabs.
    """
    pairs = []
    for lineno, line in _iter_lines(path):
        if not line.strip():
            continue
        raw, sep, count_field = line.rpartition("\t")
        if not sep:
            raise DataFormatError(
                f"{path}:{lineno}: expected 'title<TAB>count', got {line!r}"
            )
        try:
            count = int(count_field)
        except ValueError:
            raise DataFormatError(
                f"{path}:{lineno}: count is not an integer: {count_field!r}"
            ) from None
        if count <= 0:
            raise DataFormatError(f"{path}:{lineno}: count must be positive, got {count}")
        tokens = normalize(raw)
        if not tokens:
            raise DataFormatError(
                f"{path}:{lineno}: title normalizes to an empty token sequence: {raw!r}"
            )
        pairs.append((tokens, count))
    return pairs


def normalize_all(raws: Iterable[str]) -> list[TokenSeq]:
    """Normalize an iterable of raw strings, keeping empties out."""
    return [tokens for raw in raws if (tokens := normalize(raw))]
