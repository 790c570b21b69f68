"""Dataset construction and span metrics.

Labeled data pairs a vacancy title with the token span of its gold job
title. Metrics come in two granularities: token level (precision, recall,
F1 over per-token membership in the span) and title level (exact span
match). Micro pools everything; macro averages per gold-label groups, so
rare job titles weigh as much as frequent ones.
"""
from __future__ import annotations

import json
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataFormatError
from .index import build_index
from .normalize import TokenSeq, join
from .ratio import Prediction


@dataclass(frozen=True)
class LabeledVacancy:
    """A vacancy title with its gold job-title span."""

    vacancy: TokenSeq
    gold_span: tuple[int, int]
    label: TokenSeq

    def __post_init__(self):
        start, end = self.gold_span
        if not (0 <= start < end <= len(self.vacancy)):
            raise ValueError(f"gold span {self.gold_span} out of range")
        if self.label != self.vacancy[start:end]:
            raise ValueError(
                f"label {self.label} does not match vacancy tokens at {self.gold_span}"
            )

    @classmethod
    def from_span(cls, vacancy: TokenSeq, start: int, end: int) -> "LabeledVacancy":
        return cls(vacancy, (start, end), vacancy[start:end])


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    title_accuracy: float


@dataclass(frozen=True)
class LabelMetrics(Metrics):
    support: int


@dataclass(frozen=True)
class MetricsReport:
    micro: Metrics
    macro: Metrics
    per_label: dict[TokenSeq, LabelMetrics]

    def to_json_dict(self) -> dict:
        def as_dict(m: Metrics) -> dict:
            d = {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "title_accuracy": m.title_accuracy,
            }
            if isinstance(m, LabelMetrics):
                d["support"] = m.support
            return d

        return {
            "micro": as_dict(self.micro),
            "macro": as_dict(self.macro),
            "per_label": {join(k): as_dict(v) for k, v in self.per_label.items()},
        }


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def _prf(tp: int, n_pred: int, n_gold: int, hits: int, n: int) -> tuple:
    precision = _safe_div(tp, n_pred)
    recall = _safe_div(tp, n_gold)
    f1 = _safe_div(2 * precision * recall, precision + recall)
    return precision, recall, f1, _safe_div(hits, n)


def evaluate(
    predictions: Sequence[Prediction], golds: Sequence[LabeledVacancy]
) -> MetricsReport:
    """Score aligned predictions against gold labels.

    Token level treats each vacancy token as positive iff it lies inside the
    span; an absent prediction contributes zero predicted tokens and a title
    miss. Undefined quotients (no predicted or no gold positives) score 0.
    Micro pools tokens and titles across the whole set; macro averages the
    per-label scores, every gold label contributing once.
    """
    if len(predictions) != len(golds):
        raise ValueError(
            f"got {len(predictions)} predictions for {len(golds)} gold labels"
        )
    pooled = Counter()
    by_label: dict[TokenSeq, Counter] = defaultdict(Counter)
    for pred, gold in zip(predictions, golds):
        if pred.vacancy != gold.vacancy:
            raise ValueError(
                f"prediction vacancy {join(pred.vacancy)!r} does not match "
                f"gold vacancy {join(gold.vacancy)!r}"
            )
        gs, ge = gold.gold_span
        if pred.span is None:
            ps, pe = 0, 0
        else:
            ps, pe = pred.span
        overlap = max(0, min(pe, ge) - max(ps, gs))
        cell = Counter(
            tp=overlap,
            n_pred=pe - ps,
            n_gold=ge - gs,
            hits=int(pred.span == gold.gold_span),
            n=1,
        )
        pooled += cell
        by_label[gold.label] += cell

    micro = Metrics(
        *_prf(pooled["tp"], pooled["n_pred"], pooled["n_gold"], pooled["hits"], pooled["n"])
    )
    per_label = {}
    for label in sorted(by_label, key=lambda t: (len(t), t)):
        c = by_label[label]
        per_label[label] = LabelMetrics(
            *_prf(c["tp"], c["n_pred"], c["n_gold"], c["hits"], c["n"]), support=c["n"]
        )
    k = len(per_label)
    macro = Metrics(
        _safe_div(sum(m.precision for m in per_label.values()), k),
        _safe_div(sum(m.recall for m in per_label.values()), k),
        _safe_div(sum(m.f1 for m in per_label.values()), k),
        _safe_div(sum(m.title_accuracy for m in per_label.values()), k),
    )
    return MetricsReport(micro, macro, per_label)


def inclusion_safe_split(
    known_titles: Iterable[TokenSeq], test_fraction: float, seed: int
) -> tuple[set[TokenSeq], set[TokenSeq]]:
    """Split titles so no containment relation crosses the train/test line.

    Titles connected by containment (directly or transitively) always land on
    the same side: whole connected components are dealt to the test side, in
    seeded shuffle order, until the test side reaches floor(fraction * total)
    titles (at least one). Deterministic for a fixed seed.
    """
    if not (0.0 < test_fraction < 1.0):
        raise ValueError(f"test fraction must be in (0, 1), got {test_fraction}")
    titles = sorted(set(known_titles), key=lambda t: (len(t), t))
    if not titles:
        return set(), set()
    # Union containment-connected titles; the index finds contained titles
    # without a quadratic pairwise scan.
    parent = list(range(len(titles)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    idx = build_index(titles)
    pos = {t: i for i, t in enumerate(titles)}
    for i, title in enumerate(titles):
        for entry in idx.contained_entries(title):
            ri, rj = find(i), find(pos[entry.tokens])
            if ri != rj:
                parent[ri] = rj

    components: dict[int, list[TokenSeq]] = defaultdict(list)
    for i, title in enumerate(titles):
        components[find(i)].append(title)
    ordered = sorted(components.values(), key=lambda c: (len(c[0]), c[0]))
    rng = random.Random(seed)
    rng.shuffle(ordered)

    target = max(1, int(test_fraction * len(titles)))
    test: set[TokenSeq] = set()
    train: set[TokenSeq] = set()
    for component in ordered:
        if len(test) < target:
            test.update(component)
        else:
            train.update(component)
    return train, test


def label_vacancies(
    vacancies: Iterable[TokenSeq], known_titles: Iterable[TokenSeq]
) -> tuple[list[LabeledVacancy], Counter]:
    """Auto-annotate vacancies by the known titles they contain.

    A vacancy containing at least one known title is labeled with the longest
    contained one (ties: earliest occurrence, then lexicographically
    smallest), located at its first occurrence. Vacancies containing none go
    to the returned background multiset.
    """
    known = set(known_titles)
    if not known:
        raise ValueError("known_titles must be non-empty")
    idx = build_index(known)
    labeled = []
    background: Counter[TokenSeq] = Counter()
    for vacancy in vacancies:
        best_key = None
        best_span = None
        for eid, start, end in idx._match_spans(vacancy):
            key = (start - end, start, idx._tokens[eid])
            if best_key is None or key < best_key:
                best_key = key
                best_span = (start, end)
        if best_span is None:
            background[vacancy] += 1
        else:
            labeled.append(LabeledVacancy.from_span(vacancy, *best_span))
    return labeled, background


# -- files -------------------------------------------------------------------


def write_labeled(labeled: Sequence[LabeledVacancy], path: str | Path) -> None:
    """Write gold labels as ``vacancy<TAB>start<TAB>end`` lines."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for item in labeled:
            handle.write(f"{join(item.vacancy)}\t{item.gold_span[0]}\t{item.gold_span[1]}\n")


def read_labeled(path: str | Path) -> list[LabeledVacancy]:
    """Read a gold label file written by :func:`write_labeled`."""
    labeled = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise DataFormatError(
                    f"{path}:{lineno}: expected 3 tab-separated fields, got {len(fields)}"
                )
            vacancy = tuple(fields[0].split(" "))
            try:
                start, end = int(fields[1]), int(fields[2])
                labeled.append(LabeledVacancy.from_span(vacancy, start, end))
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: {exc}") from None
    return labeled


def write_report(report: MetricsReport, path: str | Path) -> None:
    """Write a key-sorted JSON report; bytes are stable for CI comparison."""
    text = json.dumps(report.to_json_dict(), sort_keys=True, indent=2)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text + "\n")
