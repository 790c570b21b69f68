"""Deterministic generator of labeled synthetic vacancy corpora.

Job titles are short compositions over a closed head/modifier vocabulary
("retail manager", "data engineer"). Each vacancy embeds exactly one job
title, either bare or decorated with a seniority-style prefix and/or a
location/terms-style suffix. The decoration vocabulary is disjoint from the
title vocabulary, so every gold span is unambiguous and exactly checkable.
Title frequencies follow a Zipf law, giving the heavy-tailed mix of frequent
and rare titles that makes macro metrics interesting.

Everything is driven by one seeded RNG: the same config always produces the
same corpus, byte for byte.
"""
from __future__ import annotations

import dataclasses
import math
import json
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataFormatError
from .evaluation import LabeledVacancy, write_labeled
from .normalize import TokenSeq, join, normalize

# Closed vocabularies. Heads and modifiers build job titles; prefix and
# suffix pools build decorations. The four pools share no token, which keeps
# gold spans unambiguous (see SynthConfig.validate). Single-token titles use
# their own head subset, so a one-word title is never the tail of a longer
# one; otherwise decorated variants of frequent one-word titles would nest
# inside the variants of every compound sharing the head and slide down the
# ratio scale into the job-title band.
SOLO_HEADS = (
    "neurologist", "electrician", "dietitian", "librarian", "translator",
    "surveyor", "recruiter", "paralegal", "optician", "midwife",
)
COMPOUND_HEADS = (
    "engineer", "manager", "nurse", "developer", "analyst", "designer",
    "consultant", "technician", "scientist", "administrator", "specialist",
    "coordinator", "architect", "therapist", "accountant", "planner",
    "operator", "advisor",
)
HEADS = SOLO_HEADS + COMPOUND_HEADS
MODIFIERS = (
    "software", "data", "marketing", "sales", "financial", "clinical",
    "mechanical", "electrical", "hr", "product", "project", "security",
    "network", "logistics", "retail", "legal", "research", "support",
    "quality", "operations", "payroll", "warehouse", "frontend", "backend",
)
DEFAULT_PREFIXES = (
    "senior", "junior", "lead", "principal", "trainee", "interim",
    "experienced", "graduate",
)
DEFAULT_SUFFIXES = (
    "at acmecorp", "at globomax", "at nordwind", "in springfield",
    "in rivertown", "full time", "part time", "remote", "night shift",
    "immediate start",
)

_TITLE_LENGTH_WEIGHTS = (0.25, 0.5, 0.25)  # 1, 2, 3 tokens


@dataclass(frozen=True)
class SynthConfig:
    """Generator knobs; defaults give the standard 10k-vacancy test corpus."""

    n_job_titles: int = 200
    n_vacancies: int = 10_000
    standalone_prob: float = 0.3
    prefix_prob: float = 0.2
    suffix_prob: float = 0.3
    prefix_pool: tuple[str, ...] = DEFAULT_PREFIXES
    suffix_pool: tuple[str, ...] = DEFAULT_SUFFIXES
    zipf_exponent: float = 1.1
    seed: int = 42

    def validate(self) -> None:
        """Raise a single error listing every violated constraint."""
        problems = []
        if self.n_job_titles < 1:
            problems.append("n_job_titles must be >= 1")
        if self.n_vacancies < 0:
            problems.append("n_vacancies must be >= 0")
        for name in ("standalone_prob", "prefix_prob", "suffix_prob"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                problems.append(f"{name} must be in [0, 1], got {value}")
        if self.standalone_prob < 1.0 and self.prefix_prob == 0 and self.suffix_prob == 0:
            problems.append(
                "decorated vacancies are possible but both slot probabilities are 0"
            )
        if self.zipf_exponent < 0:
            problems.append("zipf_exponent must be >= 0")
        if not self.prefix_pool:
            problems.append("prefix_pool must not be empty")
        if not self.suffix_pool:
            problems.append("suffix_pool must not be empty")
        title_vocab = set(HEADS) | set(MODIFIERS)
        decoration_vocab = set(self.prefix_pool) | {
            tok for suffix in self.suffix_pool for tok in suffix.split()
        }
        overlap = title_vocab & decoration_vocab
        if overlap:
            problems.append(
                f"decoration pools overlap the title vocabulary: {sorted(overlap)}"
            )
        for pool_name in ("prefix_pool", "suffix_pool"):
            for item in getattr(self, pool_name):
                if tuple(item.split()) != normalize(item) or not item:
                    problems.append(f"{pool_name} item {item!r} is not normalized")
        max_titles = len(SOLO_HEADS) + len(COMPOUND_HEADS) * (
            len(MODIFIERS) + len(MODIFIERS) * (len(MODIFIERS) - 1)
        )
        if self.n_job_titles > max_titles:
            problems.append(
                f"n_job_titles {self.n_job_titles} exceeds the {max_titles} distinct "
                "titles the vocabulary can produce"
            )
        if problems:
            raise ValueError("invalid generator config: " + "; ".join(problems))

    @classmethod
    def from_json_dict(cls, data: dict) -> "SynthConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise DataFormatError(f"unknown config keys: {sorted(unknown)}")
        for key in ("prefix_pool", "suffix_pool"):
            if key in data:
                data = {**data, key: tuple(data[key])}
        return cls(**data)

    def to_json_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data["prefix_pool"] = list(self.prefix_pool)
        data["suffix_pool"] = list(self.suffix_pool)
        return data


@dataclass(frozen=True)
class GeneratedCorpus:
    vacancies: list[TokenSeq]
    gold: list[LabeledVacancy]
    job_titles: set[TokenSeq]


def _sample_job_titles(rng: random.Random, n: int) -> list[TokenSeq]:
    titles: list[TokenSeq] = []
    seen = set()
    while len(titles) < n:
        length = rng.choices((1, 2, 3), weights=_TITLE_LENGTH_WEIGHTS)[0]
        if length == 1:
            title = (rng.choice(SOLO_HEADS),)
        elif length == 2:
            title = (rng.choice(MODIFIERS), rng.choice(COMPOUND_HEADS))
        else:
            first, second = rng.sample(MODIFIERS, 2)
            title = (first, second, rng.choice(COMPOUND_HEADS))
        if title not in seen:
            seen.add(title)
            titles.append(title)
    return titles


def generate(config: SynthConfig = SynthConfig()) -> GeneratedCorpus:
    """Generate a labeled corpus; identical config gives identical output.

    Titles are drawn with Zipf weights (rank order = sampling order). With
    probability ``standalone_prob`` a vacancy is the bare job title;
    otherwise at least one decoration slot is filled, re-rolling the two
    slot draws until one hits.
    """
    config.validate()
    rng = random.Random(config.seed)
    titles = _sample_job_titles(rng, config.n_job_titles)
    weights = [1.0 / (rank + 1) ** config.zipf_exponent for rank in range(len(titles))]

    suffix_tokens = [tuple(s.split()) for s in config.suffix_pool]
    vacancies: list[TokenSeq] = []
    gold: list[LabeledVacancy] = []
    drawn: Counter[TokenSeq] = Counter()
    bare: Counter[TokenSeq] = Counter()
    first_at: dict[TokenSeq, int] = {}
    for i in range(config.n_vacancies):
        title = rng.choices(titles, weights=weights)[0]
        drawn[title] += 1
        first_at.setdefault(title, i)
        if rng.random() < config.standalone_prob:
            bare[title] += 1
            vacancies.append(title)
            gold.append(LabeledVacancy(title, (0, len(title)), title))
            continue
        use_prefix = use_suffix = False
        while not (use_prefix or use_suffix):
            use_prefix = rng.random() < config.prefix_prob
            use_suffix = rng.random() < config.suffix_prob
        prefix = (rng.choice(config.prefix_pool),) if use_prefix else ()
        suffix = rng.choice(suffix_tokens) if use_suffix else ()
        vacancy = prefix + title + suffix
        start = len(prefix)
        vacancies.append(vacancy)
        gold.append(LabeledVacancy(vacancy, (start, start + len(title)), title))

    # Frequent titles always occur standalone in real vacancy streams; a
    # random draw can miss that for a handful of titles, so undecorate the
    # first instance of any frequent title the dice left fully decorated.
    if config.standalone_prob > 0:
        weight_total = sum(weights)
        for rank, title in enumerate(titles):
            expected = config.n_vacancies * weights[rank] / weight_total
            needed = math.ceil(config.standalone_prob * expected)
            if expected >= 10 and drawn[title] >= needed and bare[title] == 0:
                i = first_at[title]
                vacancies[i] = title
                gold[i] = LabeledVacancy(title, (0, len(title)), title)
    return GeneratedCorpus(vacancies, gold, set(titles))


def write_corpus(corpus: GeneratedCorpus, out_dir: str | Path) -> dict[str, Path]:
    """Write vacancies.txt, gold.tsv and titles.txt under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "vacancies": out / "vacancies.txt",
        "gold": out / "gold.tsv",
        "titles": out / "titles.txt",
    }
    with open(paths["vacancies"], "w", encoding="utf-8", newline="\n") as handle:
        for vacancy in corpus.vacancies:
            handle.write(join(vacancy) + "\n")
    write_labeled(corpus.gold, paths["gold"])
    with open(paths["titles"], "w", encoding="utf-8", newline="\n") as handle:
        for title in sorted(corpus.job_titles, key=lambda t: (len(t), t)):
            handle.write(join(title) + "\n")
    return paths


def standalone_counts(corpus: GeneratedCorpus) -> Counter:
    """How often each job title occurs as an undecorated vacancy."""
    bare = Counter()
    for item in corpus.gold:
        if item.vacancy == item.label:
            bare[item.label] += 1
    return bare
