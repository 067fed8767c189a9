import csv
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discrim import measures
from discrim.corpusops import (CorpusError, InvalidFeature, LeaderboardRow, LeaderboardTable, assemble_table,
                               child_id, children_of, holdout_split, make_groups, manifest_rows, partition,
                               read_leaderboard, sample_feature_values, sample_features, simulate_leaderboard,
                               split_by_feature)
from discrim.textprofile import TextDataset, TextSample, read_jsonl

from _synth import BOARD, regression_corpus, board_leaderboard_csv, text_corpus

DATA = Path(__file__).parent / "data"


def lengths_dataset(lengths, splits=None):
    splits = splits or ["train", "test"] * (len(lengths) // 2 + 1)
    return TextDataset("p", [TextSample(f"s{i}", " ".join(["w"] * n), "a", splits[i])
                             for i, n in enumerate(lengths)])


def board(rows):
    return LeaderboardTable([LeaderboardRow("b", d, s, v) for d, s, v in rows])


# split_by_feature

def test_split_two_bins():
    d = lengths_dataset([1, 2, 3, 4], ["train", "test", "train", "test"])
    kids = split_by_feature(d, "len", bins=2, min_size=1)
    assert [len(k) for k in kids] == [2, 2]
    assert [k.dataset_id for k in kids] == ["p#len#0", "p#len#1"]
    ids = [{s.id for s in k.samples} for k in kids]
    assert ids[0] & ids[1] == set()
    assert ids[0] | ids[1] == {s.id for s in d.samples}


def test_split_constant_values_single_bin():
    d = lengths_dataset([3, 3, 3, 3])
    spec = partition(d, "len", bins=3)
    assert spec.bin_edges == (3.0,)
    kids = children_of(d, spec, min_size=1)
    assert len(kids) == 1 and kids[0].samples == d.samples


def test_split_golden_assignment():
    d = read_jsonl(DATA / "golden_split_corpus.jsonl")
    with open(DATA / "golden_split_len3.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    spec = partition(d, "len", bins=3)
    np.testing.assert_allclose(spec.bin_edges, [2, 3 + 2 * 2 / 3, 6 + 2 / 3, 12])
    np.testing.assert_array_equal(sample_feature_values(d, "len"), [int(r["tokens"]) for r in
                                                                   sorted(rows, key=lambda r: r["sample_id"])])
    assert spec.assignments == {r["sample_id"]: int(r["bin"]) for r in rows}


def test_split_preserves_split_membership_and_drops_small_bins():
    d = lengths_dataset([1, 1, 1, 1, 5, 5, 5, 5], ["train"] * 4 + ["train", "train", "train", "test"])
    kids = split_by_feature(d, "len", bins=2, min_size=1)
    # the short bin has no test samples
    assert [k.dataset_id for k in kids] == ["p#len#1"]
    assert [s.split for s in kids[0].samples] == ["train", "train", "train", "test"]


def test_split_rejects_non_sample_feature():
    with pytest.raises(InvalidFeature):
        split_by_feature(lengths_dataset([1, 2]), "bal", 2)
    with pytest.raises(CorpusError):
        split_by_feature(lengths_dataset([1, 2]), "len", 1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=2, max_size=40), st.integers(2, 5),
       st.sampled_from(["len", "ttr", "fre", "basic", "gerr"]), st.integers(1, 3))
def test_children_disjoint_and_cover_kept_samples(lengths, bins, feature, min_size):
    d = text_corpus("p", len(lengths), seed=sum(lengths), mean_len=8)
    spec = partition(d, feature, bins)
    kids = children_of(d, spec, min_size)
    seen = [s.id for k in kids for s in k.samples]
    assert len(seen) == len(set(seen))
    kept_bins = {int(k.dataset_id.rsplit("#", 1)[1]) for k in kids}
    assert set(seen) == {sid for sid, b in spec.assignments.items() if b in kept_bins}
    assert set(spec.assignments.values()) <= set(range(max(1, len(spec.bin_edges) - 1)))


def test_manifest_rows():
    d = lengths_dataset([1, 2, 3, 4], ["train", "test", "train", "test"])
    spec = partition(d, "len", 2)
    rows = manifest_rows(spec, children_of(d, spec, 1))
    assert rows == [["p#len#0", "p", "len", 0, 1.0, 2.5, 1, 1], ["p#len#1", "p", "len", 1, 2.5, 4.0, 1, 1]]
    assert child_id("x", "ttr", 2) == "x#ttr#2"


def test_sample_features():
    a = sample_features(3, seed=5)
    assert a == sample_features(3, seed=5)
    assert len(set(a)) == 3
    with pytest.raises(CorpusError):
        sample_features(9, seed=0)


# leaderboards and assemble_table

def test_read_leaderboard(tmp_path):
    p = tmp_path / "lb.csv"
    p.write_text("benchmark,dataset,system,score\nglue,x,s1,88\nglue,x,s2,92\nglue,x,s3,93\n")
    t = read_leaderboard(p)
    (pl,), skipped = t.performance_lists()
    assert skipped == [] and pl.upper_limit == 100
    p.write_text("benchmark,dataset,system,score\nglue,x,s1,88\nglue,x,s1,92\n")
    with pytest.raises(CorpusError):
        read_leaderboard(p)


def test_top_systems(tmp_path):
    p = tmp_path / "lb.csv"
    p.write_text(board_leaderboard_csv())
    lists, _ = read_leaderboard(p).performance_lists(top=2)
    assert list(lists[0].scores) == [54.12, 47.60]


def test_assemble_worked_example():
    t, skipped = assemble_table({"x": {"tr_len": 3.0}}, board([("x", "a", 88), ("x", "b", 92), ("x", "c", 93)]))
    assert skipped == []
    assert t.lambda_var[0] == pytest.approx(2.65, abs=0.005)
    assert t.lambda_sva[0] == pytest.approx(23.81, abs=0.01)


def test_assemble_skips_incomplete_rows():
    scores = board([("x", "a", 88), ("x", "b", 92), ("y", "a", 70), ("z", "a", 50), ("z", "b", 60)])
    t, skipped = assemble_table({"x": {"f": 1.0}, "y": {"f": 2.0}, "w": {"f": 3.0}}, scores)
    assert t.dataset_ids == ("x",)
    assert sorted(skipped) == ["w", "y", "z"]


def test_assemble_targets_match_measures():
    scores = board([(d, s, v) for d, (vals, *_r) in BOARD.items() for s, v in zip("abcd", vals)])
    profiles = {d: {"tr_len": float(i)} for i, d in enumerate(BOARD)}
    t, _ = assemble_table(profiles, scores, target="sva")
    assert t.target_kind == "sva"
    for i, (d, (vals, *_r)) in enumerate(BOARD.items()):
        p = measures.PerformanceList(d, vals, list("abcd"))
        assert abs(t.lambda_var[i] - measures.perf_variance(p)) <= 1e-12
        assert abs(t.lambda_sva[i] - measures.scaled_perf_variance(p)) <= 1e-12
        assert t.lambda_var[i] == pytest.approx(BOARD[d][2], abs=0.01)


# sampling

def test_holdout_split():
    t = regression_corpus(987)
    train, test = holdout_split(t, 287, seed=1)
    assert (len(train), len(test)) == (700, 287)
    assert set(train.dataset_ids) | set(test.dataset_ids) == set(t.dataset_ids)
    assert not set(train.dataset_ids) & set(test.dataset_ids)
    again = holdout_split(t, 287, seed=1)
    assert again[1].dataset_ids == test.dataset_ids
    assert len(holdout_split(t, 0, 0)[1]) == 0
    assert len(holdout_split(t, 987, 0)[0]) == 0
    with pytest.raises(CorpusError):
        holdout_split(t, 988, 0)


def test_make_groups():
    t = regression_corpus(20)
    groups = make_groups(t, 5, 100, seed=3)
    assert len(groups) == 100
    for g in groups:
        assert len(set(g.rows)) == 5 and all(0 <= r < 20 for r in g.rows)
        assert [tgt for _, tgt in g.members] == [float(t.y[r]) for r in g.rows]
    assert [g.rows for g in make_groups(t, 5, 100, seed=3)] == [g.rows for g in groups]
    full = make_groups(t, 20, 3, seed=0)
    assert all(sorted(g.rows) == list(range(20)) for g in full)
    with pytest.raises(CorpusError):
        make_groups(t, 21, 1, 0)


# simulator

def test_simulator_spread_follows_driver():
    profiles = {"short": {"tr_len": 2.0}, "long": {"tr_len": 40.0}}
    lb = simulate_leaderboard(profiles, k=4, seed=0, noise=0.0)
    t, _ = assemble_table(profiles, lb)
    assert t.lambda_var[1] > t.lambda_var[0]
    # noise-free spread is 0.5 + 0.25 * len over offsets -1, -1/3, 1/3, 1
    offsets = np.linspace(-1, 1, 4)
    assert t.lambda_var[0] == pytest.approx(np.std(1.0 * offsets, ddof=1))


def test_simulator_per_dataset_streams():
    a = simulate_leaderboard({"x": {"tr_len": 5.0}, "y": {"tr_len": 6.0}}, seed=9)
    b = simulate_leaderboard({"y": {"tr_len": 6.0}}, seed=9)
    ys = [r.score for r in a.rows if r.dataset_id == "y"]
    assert ys == [r.score for r in b.rows]
