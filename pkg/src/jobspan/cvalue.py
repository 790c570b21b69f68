"""C-value termhood baseline and the identity baseline.

The C-value of a candidate n-gram rewards frequency and length while
penalizing candidates that mostly occur nested inside longer candidates:

    non-nested a:  cvalue = w(|a|) * f(a)
    nested a:      cvalue = w(|a|) * (f(a) - nested_freq_sum / nest_count)

where f(a) counts every occurrence of ``a`` as a contiguous token
subsequence across corpus instances, and the nested terms range over the
candidates (meeting the frequency floor) that strictly contain ``a``. The
classic length weight w = log2(|a|) zeroes all unigrams, which is a poor fit
for corpora where one-word titles are legitimate; the ``smoothed`` weight
log2(|a| + 1) is offered as an escape hatch. The classic weight is the
default for fidelity to the original method.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal, Mapping

from .errors import DataFormatError
from .normalize import TokenSeq, join
from .ratio import Prediction

LengthWeight = Literal["classic", "smoothed"]
WEIGHTS = ("classic", "smoothed")

DEFAULT_MIN_COUNT = 5
DEFAULT_THRESHOLD = 0.0


@dataclass(frozen=True)
class CValueEntry:
    tokens: TokenSeq
    freq: int
    nest_count: int
    nested_freq_sum: int
    cvalue: float


def _length_weight(n_tokens: int, weight: str) -> float:
    if weight == "classic":
        return math.log2(n_tokens)
    return math.log2(n_tokens + 1)


def cvalue_scores(
    corpus: Iterable[TokenSeq] | Mapping[TokenSeq, int],
    min_count: int = DEFAULT_MIN_COUNT,
    length_weight: LengthWeight = "classic",
) -> dict[TokenSeq, CValueEntry]:
    """Score all contiguous token n-grams of the corpus with freq >= min_count.

    ``corpus`` is a title multiset (iterable with repetition, or mapping to
    counts). Occurrences are counted per position, so a title containing the
    same n-gram twice contributes twice to its frequency.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    if length_weight not in WEIGHTS:
        raise ValueError(f"unknown weight {length_weight!r}; expected one of {WEIGHTS}")

    if isinstance(corpus, Mapping):
        title_counts = Counter(dict(corpus))
    else:
        title_counts = Counter(corpus)

    freq: Counter[TokenSeq] = Counter()
    for title, count in title_counts.items():
        m = len(title)
        for i in range(m):
            for j in range(i + 1, m + 1):
                freq[title[i:j]] += count
    candidates = {gram: f for gram, f in freq.items() if f >= min_count}

    nest_count: Counter[TokenSeq] = Counter()
    nested_sum: Counter[TokenSeq] = Counter()
    for outer, f_outer in candidates.items():
        m = len(outer)
        subgrams = {
            outer[i:j]
            for i in range(m)
            for j in range(i + 1, m + 1)
            if j - i < m and outer[i:j] in candidates
        }
        for gram in subgrams:
            nest_count[gram] += 1
            nested_sum[gram] += f_outer

    scores = {}
    for gram, f in candidates.items():
        n_nests = nest_count.get(gram, 0)
        s_nested = nested_sum.get(gram, 0)
        weight = _length_weight(len(gram), length_weight)
        if n_nests == 0:
            value = weight * f
        else:
            value = weight * (f - s_nested / n_nests)
        scores[gram] = CValueEntry(gram, f, n_nests, s_nested, value)
    return scores


def cvalue_extract(
    scores: Mapping[TokenSeq, CValueEntry],
    vacancy: TokenSeq,
    threshold: float = DEFAULT_THRESHOLD,
) -> Prediction:
    """Predict the scored subspan of ``vacancy`` with the highest C-value.

    Only candidates strictly above ``threshold`` qualify; ties prefer the
    longer candidate, then the lexicographically smallest. The span is the
    candidate's first occurrence. No qualifying subspan yields an absent
    span.
    """
    if not vacancy:
        raise ValueError("vacancy must be non-empty")
    best_key = None
    best_span = None
    m = len(vacancy)
    for i in range(m):
        for j in range(i + 1, m + 1):
            gram = vacancy[i:j]
            entry = scores.get(gram)
            if entry is None or entry.cvalue <= threshold:
                continue
            # Equal grams at later positions compare equal, never strictly
            # smaller, so the first occurrence wins automatically.
            key = (-entry.cvalue, i - j, gram)
            if best_key is None or key < best_key:
                best_key = key
                best_span = (i, j)
    if best_span is None:
        return Prediction(vacancy, None, None)
    return Prediction(vacancy, best_span, None)


def identity_extract(vacancy: TokenSeq) -> Prediction:
    """Baseline that predicts the whole vacancy title as the job title.

    Its token recall is 1 on every labeled dataset by construction.
    """
    if not vacancy:
        raise ValueError("vacancy must be non-empty")
    return Prediction(vacancy, (0, len(vacancy)), None)


# -- score files -------------------------------------------------------------

_SCORES_HEADER = "#jobspan-cvalue-scores\tv1"


def write_scores(scores: Mapping[TokenSeq, CValueEntry], path: str | Path) -> None:
    """Write scores as ``ngram<TAB>freq<TAB>nests<TAB>nested_sum<TAB>cvalue``.

    Rows are ordered by descending C-value, then canonically by the n-gram,
    so output bytes are deterministic.
    """
    entries = sorted(
        scores.values(), key=lambda e: (-e.cvalue, len(e.tokens), e.tokens)
    )
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(_SCORES_HEADER + "\n")
        for e in entries:
            handle.write(
                f"{join(e.tokens)}\t{e.freq}\t{e.nest_count}\t"
                f"{e.nested_freq_sum}\t{e.cvalue!r}\n"
            )


def read_scores(path: str | Path) -> dict[TokenSeq, CValueEntry]:
    """Read a score file written by :func:`write_scores`."""
    scores = {}
    with open(path, encoding="utf-8") as handle:
        first = handle.readline().rstrip("\n")
        if first != _SCORES_HEADER:
            raise DataFormatError(f"{path}: not a jobspan cvalue scores file")
        for lineno, line in enumerate(handle, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 5:
                raise DataFormatError(
                    f"{path}:{lineno}: expected 5 tab-separated fields, got {len(fields)}"
                )
            try:
                tokens = tuple(fields[0].split(" "))
                entry = CValueEntry(
                    tokens, int(fields[1]), int(fields[2]), int(fields[3]),
                    float(fields[4]),
                )
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: {exc}") from None
            if not all(tokens):
                raise DataFormatError(f"{path}:{lineno}: malformed ngram field")
            scores[tokens] = entry
    return scores
