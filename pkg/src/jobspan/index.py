"""Immutable word-level containment index over a multiset of titles.

The index stores one entry per distinct normalized title together with its
standalone count (how many corpus instances equal it exactly) and answers
containment queries: which entries occur as a contiguous token subsequence
of a given sequence, how many corpus instances contain a given entry, and
which entries are the minimal strict containers ("immediate covers") of a
given entry.

Acceleration is a token-level trie walked from every start position of the
query; query results are set-semantic and agree exactly with a brute-force
containment scan (the test suite checks this against an independent oracle).
After construction the index is immutable, so concurrent reads from any
number of threads are safe.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DataFormatError, IndexFormatError, UnindexedTitleError
from .normalize import TokenSeq, join

INDEX_FORMAT = "jobspan-title-index"
INDEX_VERSION = 1

# Trie nodes are plain dicts mapping token -> child node; the entry id of a
# node that terminates an indexed title is stored under this key (tokens are
# always strings, so None can never collide).
_ENTRY_KEY = None


@dataclass(frozen=True)
class TitleEntry:
    """A distinct indexed title and its standalone corpus count."""

    tokens: TokenSeq
    standalone_count: int


@dataclass(frozen=True)
class IndexStats:
    """Summary statistics of an index."""

    n_unique_titles: int
    max_tokens_per_title: int
    n_instances: int


def _canonical_key(tokens: TokenSeq):
    return (len(tokens), tokens)


def contains(inner: TokenSeq, outer: TokenSeq) -> bool:
    """True if ``inner`` occurs as a contiguous token subsequence of ``outer``."""
    n, m = len(inner), len(outer)
    if n > m:
        return False
    first = inner[0]
    for i in range(m - n + 1):
        if outer[i] == first and outer[i : i + n] == inner:
            return True
    return False


class TitleIndex:
    """Containment index built once from a title multiset, then read-only."""

    def __init__(self, counts: Mapping[TokenSeq, int]):
        for tokens in counts:
            if not tokens:
                raise ValueError("cannot index an empty token sequence")
        # Canonical entry order (token count, then lexicographic) makes every
        # derived structure and the persisted file independent of input order.
        ordered = sorted(counts, key=_canonical_key)
        self._tokens = ordered
        self._standalone = [counts[t] for t in ordered]
        self._eid_of = {t: i for i, t in enumerate(ordered)}
        self._entries = [
            TitleEntry(t, c) for t, c in zip(self._tokens, self._standalone)
        ]
        self._trie = self._build_trie()
        self._total, self._covers = self._accumulate()
        self.stats = IndexStats(
            n_unique_titles=len(ordered),
            max_tokens_per_title=max((len(t) for t in ordered), default=0),
            n_instances=sum(self._standalone),
        )

    # -- construction ---------------------------------------------------

    def _build_trie(self) -> dict:
        root: dict = {}
        for eid, tokens in enumerate(self._tokens):
            node = root
            for tok in tokens:
                child = node.get(tok)
                if child is None:
                    child = {}
                    node[tok] = child
                node = child
            node[_ENTRY_KEY] = eid
        return root

    def _accumulate(self):
        """Single pass over distinct titles: totals and minimal covers.

        Processing titles in canonical order means every strict container of
        an entry arrives after it and in deterministic order; a container is
        an immediate cover exactly when no already-recorded cover of the same
        entry is contained in it.
        """
        n = len(self._tokens)
        total = [0] * n
        covers: list[list[int]] = [[] for _ in range(n)]
        for uid, tokens in enumerate(self._tokens):
            count = self._standalone[uid]
            matched = self._match_ids(tokens)
            matched_set = set(matched)
            for eid in matched:
                total[eid] += count
                if eid == uid:
                    continue
                if not any(x in matched_set for x in covers[eid]):
                    covers[eid].append(uid)
        return total, [tuple(c) for c in covers]

    def _match_ids(self, seq: TokenSeq) -> list[int]:
        """Entry ids contained in ``seq``, deduplicated, first-match order."""
        root = self._trie
        seen: dict[int, None] = {}
        m = len(seq)
        for i in range(m):
            node = root
            for j in range(i, m):
                node = node.get(seq[j])
                if node is None:
                    break
                eid = node.get(_ENTRY_KEY)
                if eid is not None and eid not in seen:
                    seen[eid] = None
        return list(seen)

    def _match_spans(self, seq: TokenSeq) -> list[tuple[int, int, int]]:
        """(entry id, start, end) of the first occurrence of each contained entry."""
        root = self._trie
        found: dict[int, tuple[int, int, int]] = {}
        m = len(seq)
        for i in range(m):
            node = root
            for j in range(i, m):
                node = node.get(seq[j])
                if node is None:
                    break
                eid = node.get(_ENTRY_KEY)
                if eid is not None and eid not in found:
                    found[eid] = (eid, i, j + 1)
        return list(found.values())

    # -- lookups ----------------------------------------------------------

    def _eid(self, tokens: TokenSeq) -> int:
        eid = self._eid_of.get(tokens)
        if eid is None:
            raise UnindexedTitleError(tokens)
        return eid

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, tokens: TokenSeq) -> bool:
        return tokens in self._eid_of

    @property
    def entries(self) -> list[TitleEntry]:
        """All entries in canonical order (token count, then lexicographic)."""
        return list(self._entries)

    def entry(self, tokens: TokenSeq) -> TitleEntry:
        return self._entries[self._eid(tokens)]

    def standalone_count(self, tokens: TokenSeq) -> int:
        """Corpus instances exactly equal to ``tokens``."""
        return self._standalone[self._eid(tokens)]

    def total_count(self, tokens: TokenSeq) -> int:
        """Corpus instances (with multiplicity) containing ``tokens``.

        Each instance is counted once even if the entry occurs at several
        positions inside it.
        """
        return self._total[self._eid(tokens)]

    def contained_entries(self, seq: TokenSeq) -> set[TitleEntry]:
        """Entries occurring as a contiguous subsequence of ``seq``.

        Includes the entry equal to ``seq`` when indexed. ``seq`` itself does
        not need to be indexed.
        """
        if not seq:
            raise ValueError("query sequence must be non-empty")
        return {self._entries[eid] for eid in self._match_ids(seq)}

    def immediate_covers(self, tokens: TokenSeq) -> set[TitleEntry]:
        """Minimal entries strictly containing ``tokens``.

        An entry X strictly containing ``tokens`` is a cover when no other
        indexed Y satisfies tokens < Y < X (strict containment both sides).
        """
        return {self._entries[eid] for eid in self._covers[self._eid(tokens)]}

    # -- persistence ------------------------------------------------------

    def save(self, path: str | Path) -> None:
        """Write the index to a single versioned, byte-deterministic file."""
        header = {
            "format": INDEX_FORMAT,
            "version": INDEX_VERSION,
            "n_unique_titles": self.stats.n_unique_titles,
            "max_tokens_per_title": self.stats.max_tokens_per_title,
            "n_instances": self.stats.n_instances,
        }
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(json.dumps(header, sort_keys=True) + "\n")
            for tokens, count in zip(self._tokens, self._standalone):
                handle.write(f"{join(tokens)}\t{count}\n")

    @classmethod
    def load(cls, path: str | Path) -> "TitleIndex":
        """Load an index file; queries agree exactly with the saved index."""
        with open(path, encoding="utf-8") as handle:
            first = handle.readline()
            if not first:
                raise IndexFormatError(f"{path}: empty file")
            try:
                header = json.loads(first)
            except json.JSONDecodeError:
                raise IndexFormatError(f"{path}: missing index header") from None
            if not isinstance(header, dict) or header.get("format") != INDEX_FORMAT:
                raise IndexFormatError(f"{path}: not a {INDEX_FORMAT} file")
            version = header.get("version")
            if version != INDEX_VERSION:
                raise IndexFormatError(
                    f"{path}: file version {version} is not supported by this "
                    f"reader (supports version {INDEX_VERSION})"
                )
            counts: dict[TokenSeq, int] = {}
            for lineno, line in enumerate(handle, start=2):
                line = line.rstrip("\n")
                if not line:
                    raise IndexFormatError(f"{path}:{lineno}: blank entry line")
                text, sep, count_field = line.rpartition("\t")
                if not sep:
                    raise IndexFormatError(f"{path}:{lineno}: expected 'tokens<TAB>count'")
                try:
                    count = int(count_field)
                except ValueError:
                    raise IndexFormatError(
                        f"{path}:{lineno}: bad count {count_field!r}"
                    ) from None
                tokens = tuple(text.split(" "))
                if not all(tokens) or not tokens or count < 1:
                    raise IndexFormatError(f"{path}:{lineno}: malformed entry {line!r}")
                if tokens in counts:
                    raise IndexFormatError(f"{path}:{lineno}: duplicate entry {text!r}")
                counts[tokens] = count
        index = cls(counts)
        expected = (
            header.get("n_unique_titles"),
            header.get("max_tokens_per_title"),
            header.get("n_instances"),
        )
        actual = (
            index.stats.n_unique_titles,
            index.stats.max_tokens_per_title,
            index.stats.n_instances,
        )
        if expected != actual:
            raise IndexFormatError(
                f"{path}: header stats {expected} do not match entries {actual}; "
                "file is truncated or corrupt"
            )
        return index


def build_index(titles: Iterable[TokenSeq] | Mapping[TokenSeq, int]) -> TitleIndex:
    """Build an index from a title multiset.

    Accepts either an iterable of TokenSeq (multiplicity by repetition) or a
    mapping TokenSeq -> count; duplicate counts merge additively. The result
    is deterministic and independent of input order. Empty sequences are
    rejected with a diagnostic identifying their position.
    """
    counts: Counter[TokenSeq] = Counter()
    if isinstance(titles, Mapping):
        items = titles.items()
    else:
        items = ((t, 1) for t in titles)
    for pos, (tokens, count) in enumerate(items):
        if not tokens:
            raise DataFormatError(f"title #{pos + 1} is empty and cannot be indexed")
        if count < 1:
            raise DataFormatError(f"title #{pos + 1} has non-positive count {count}")
        counts[tuple(tokens)] += count
    return TitleIndex(counts)
