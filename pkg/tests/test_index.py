import random
from collections import Counter

import pytest

from jobspan import TitleIndex, build_index
from jobspan.errors import DataFormatError, IndexFormatError, UnindexedTitleError

from oracle import (
    VOCAB20,
    o_contained_entries,
    o_immediate_covers,
    o_total_count,
    random_corpus,
)


def tokens_of(entries):
    return {e.tokens for e in entries}


def test_single_title_multiset():
    idx = build_index([("neurologist",)] * 3)
    assert len(idx) == 1
    assert idx.entry(("neurologist",)).standalone_count == 3


def test_figure_tree_titles():
    titles = [("manager",), ("brand", "manager"), ("hr", "manager"),
              ("senior", "hr", "manager")]
    idx = build_index(titles)
    assert len(idx) == 4
    assert all(e.standalone_count == 1 for e in idx.entries)


def test_cstar_entry_counts(cstar_index):
    counts = {e.tokens: e.standalone_count for e in cstar_index.entries}
    assert counts == {
        ("hr", "manager"): 4,
        ("senior", "hr", "manager"): 2,
        ("hr", "manager", "london"): 1,
        ("senior", "hr", "manager", "at", "acme"): 1,
        ("neurologist",): 3,
        ("manager",): 1,
    }
    assert cstar_index.stats.n_unique_titles == 6
    assert cstar_index.stats.max_tokens_per_title == 5
    assert cstar_index.stats.n_instances == 12


def test_contained_entries_cstar(cstar_index):
    got = tokens_of(cstar_index.contained_entries(
        ("senior", "hr", "manager", "at", "acme")))
    assert got == {
        ("manager",), ("hr", "manager"), ("senior", "hr", "manager"),
        ("senior", "hr", "manager", "at", "acme"),
    }
    assert tokens_of(cstar_index.contained_entries(("neurologist",))) == {
        ("neurologist",)
    }
    assert cstar_index.contained_entries(("office", "hero")) == set()


def test_contained_entries_rejects_empty_query(cstar_index):
    with pytest.raises(ValueError):
        cstar_index.contained_entries(())


def test_total_count_cstar(cstar_index):
    assert cstar_index.total_count(("hr", "manager")) == 8
    assert cstar_index.total_count(("neurologist",)) == 3
    assert cstar_index.total_count(("manager",)) == 9


def test_immediate_covers_cstar(cstar_index):
    assert tokens_of(cstar_index.immediate_covers(("hr", "manager"))) == {
        ("senior", "hr", "manager"), ("hr", "manager", "london"),
    }
    assert cstar_index.immediate_covers(("neurologist",)) == set()
    assert tokens_of(cstar_index.immediate_covers(("senior", "hr", "manager"))) == {
        ("senior", "hr", "manager", "at", "acme"),
    }


def test_unindexed_title_errors(cstar_index):
    with pytest.raises(UnindexedTitleError):
        cstar_index.total_count(("office", "hero"))
    with pytest.raises(UnindexedTitleError):
        cstar_index.immediate_covers(("hr",))


def test_repeated_occurrence_counts_instance_once():
    # "manager assistant to the manager" contains "manager" twice but is one
    # instance; the containing count must not double it.
    idx = build_index([
        ("manager",),
        ("manager", "assistant", "to", "the", "manager"),
    ])
    assert idx.total_count(("manager",)) == 2


def test_build_rejects_empty_tokenseq():
    with pytest.raises(DataFormatError, match="#2"):
        build_index([("ok",), ()])


def test_build_accepts_mapping_and_merges():
    idx = build_index({("a", "b"): 2, ("a",): 1})
    assert idx.total_count(("a",)) == 3


def test_total_ge_standalone_iff_covered(cstar_index):
    for entry in cstar_index.entries:
        total = cstar_index.total_count(entry.tokens)
        assert total >= entry.standalone_count
        covered = bool(cstar_index.immediate_covers(entry.tokens))
        assert (total == entry.standalone_count) == (not covered)


def test_save_load_roundtrip(cstar_index, tmp_path):
    path = tmp_path / "index.bin"
    cstar_index.save(path)
    loaded = TitleIndex.load(path)
    assert loaded.stats == cstar_index.stats
    for entry in cstar_index.entries:
        assert loaded.total_count(entry.tokens) == cstar_index.total_count(entry.tokens)
        assert loaded.immediate_covers(entry.tokens) == cstar_index.immediate_covers(entry.tokens)
    # a second save is byte-identical
    path2 = tmp_path / "again.bin"
    loaded.save(path2)
    assert path.read_bytes() == path2.read_bytes()


def test_build_is_order_independent(cstar_counts, tmp_path):
    instances = [t for t, c in cstar_counts.items() for _ in range(c)]
    rng = random.Random(5)
    paths = []
    for i in range(3):
        rng.shuffle(instances)
        idx = build_index(list(instances))
        path = tmp_path / f"v{i}.bin"
        idx.save(path)
        paths.append(path)
    blobs = {p.read_bytes() for p in paths}
    assert len(blobs) == 1


def test_load_truncated_file(cstar_index, tmp_path):
    path = tmp_path / "index.bin"
    cstar_index.save(path)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) - 20])
    with pytest.raises(IndexFormatError, match="truncated|malformed|expected"):
        TitleIndex.load(path)


def test_load_future_version(tmp_path):
    path = tmp_path / "index.bin"
    path.write_text(
        '{"format": "jobspan-title-index", "version": 99}\na\t1\n',
        encoding="utf-8",
    )
    with pytest.raises(IndexFormatError) as exc_info:
        TitleIndex.load(path)
    assert "99" in str(exc_info.value) and "1" in str(exc_info.value)


def test_load_rejects_non_index_file(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_text("hello world\n", encoding="utf-8")
    with pytest.raises(IndexFormatError):
        TitleIndex.load(path)


def test_queries_match_oracle_small_random():
    for seed in range(8):
        rng = random.Random(seed)
        counts = random_corpus(rng, max_titles=60, vocab=VOCAB20[:8], max_len=4)
        idx = build_index(counts)
        for title in counts:
            assert tokens_of(idx.contained_entries(title)) == o_contained_entries(counts, title)
            assert idx.total_count(title) == o_total_count(counts, title)
            assert tokens_of(idx.immediate_covers(title)) == o_immediate_covers(counts, title)
        for _ in range(10):
            query = tuple(rng.choice(VOCAB20[:8]) for _ in range(rng.randint(1, 8)))
            assert tokens_of(idx.contained_entries(query)) == o_contained_entries(counts, query)


def test_cover_minimality_random():
    rng = random.Random(99)
    counts = random_corpus(rng, max_titles=120, vocab=VOCAB20[:6], max_len=5)
    idx = build_index(counts)
    entry_tokens = {e.tokens for e in idx.entries}
    for title in entry_tokens:
        covers = {e.tokens for e in idx.immediate_covers(title)}
        for x in covers:
            between = [
                y for y in entry_tokens
                if y not in (title, x)
                and o_contained(title, y) and o_contained(y, x)
            ]
            assert not between


def o_contained(inner, outer):
    n = len(inner)
    return any(outer[i:i + n] == inner for i in range(len(outer) - n + 1))
