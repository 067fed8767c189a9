import math
from fractions import Fraction
from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discrim import measures as M
from discrim.measures import PerformanceList, PredictionMatrix

from _synth import BOARD


def perf(scores, u=100.0):
    return PerformanceList.from_scores(scores, u)


def pm(*columns):
    c = np.array(columns, dtype=np.uint8).T
    return PredictionMatrix("d", [f"r{i}" for i in range(c.shape[0])], [f"s{j}" for j in range(c.shape[1])], c)


def exact_hit(a, b, tie_credit=0.0):
    """P(mean_a > mean_b) over all n**n equally likely draws with replacement."""
    n = len(a)
    total = Fraction(0)
    for draw in product(range(n), repeat=n):
        sa = sum(a[i] for i in draw)
        sb = sum(b[i] for i in draw)
        total += 1 if sa > sb else (Fraction(tie_credit) if sa == sb else 0)
    return total / n ** n


# perf_variance / scaled_perf_variance


def test_worked_example():
    p = perf([88, 92, 93])
    assert M.perf_variance(p) == pytest.approx(2.65, abs=0.005)
    assert M.perf_variance(p) == pytest.approx(math.sqrt(14 / 2), abs=1e-12)
    assert M.scaled_perf_variance(p) == pytest.approx(23.81, abs=0.01)


def test_identical_scores_have_zero_variance():
    assert M.perf_variance(perf([50, 50, 50, 50])) == 0.0
    assert M.scaled_perf_variance(perf([70, 70, 70], u=3.0)) == 0.0


@pytest.mark.parametrize("name", list(BOARD))
def test_reference_board_rows(name):
    scores, _, var, sva = BOARD[name]
    p = perf(scores)
    assert M.perf_variance(p) == pytest.approx(var, abs=0.01)
    assert M.scaled_perf_variance(p) == pytest.approx(sva, abs=0.2)


def test_negative_headroom_passes_through():
    p = perf([98, 102], u=95)
    assert M.scaled_perf_variance(p) == pytest.approx(M.perf_variance(p) * -5)


@pytest.mark.parametrize("bad", [[], [1.0]])
def test_too_few_scores(bad):
    with pytest.raises(M.InvalidInput):
        perf(bad)


def test_non_finite_upper_limit_rejected():
    with pytest.raises(M.InvalidInput):
        perf([1, 2], u=math.inf)


scores_st = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=12)


@given(scores_st, st.floats(-1e3, 1e3))
def test_translation_invariance(scores, c):
    a = M.perf_variance(perf(scores))
    b = M.perf_variance(perf([s + c for s in scores]))
    assert b == pytest.approx(a, abs=1e-9 * max(1.0, abs(c), max(map(abs, scores))))


@given(scores_st)
def test_unit_headroom_gives_plain_variance(scores):
    p = perf(scores, u=float(np.mean(scores)) + 1.0)
    assert M.scaled_perf_variance(p) == pytest.approx(M.perf_variance(p), abs=1e-9 * max(1.0, M.perf_variance(p)))


# hit rate


def test_dominance_pair_is_always_a_hit():
    m = pm([1, 1, 1, 1, 1], [0, 0, 0, 0, 0])
    assert M.pairwise_hit(m, 0, 1, iterations=50) == 1.0
    assert M.pairwise_hit(m, 1, 0, iterations=50) == 1.0  # orientation follows full-set accuracy
    assert M.hit_rate(m, iterations=50) == 1.0


def test_identical_systems():
    m = pm([1, 0, 1, 1], [1, 0, 1, 1])
    assert M.pairwise_hit(m, 0, 1, iterations=200) == 0.0
    assert M.pairwise_hit(m, 0, 1, iterations=200, tie_policy="half") == 0.5
    m3 = pm([1, 0, 1], [1, 0, 1], [1, 0, 1])
    assert M.hit_rate(m3, iterations=100) == 0.0
    assert M.hit_rate(m3, iterations=100, tie_policy="half") == 0.5


def test_enumeration_oracle_fixture():
    a, b = [1, 1, 1, 0], [1, 0, 0, 1]
    exact = exact_hit(a, b)
    assert exact == Fraction(5, 8)
    got = M.pairwise_hit(pm(a, b), 0, 1, subset_ratio=1.0, iterations=100_000, rng_seed=7)
    assert got == pytest.approx(float(exact), abs=0.01)


def test_three_system_hit_rate_matches_pairwise_enumeration():
    cols = [[1, 1, 1, 1], [1, 1, 0, 0], [0, 0, 0, 0]]
    exact = sum(exact_hit(cols[i], cols[j]) for i, j in combinations(range(3), 2)) / 3
    assert exact == Fraction(23, 24)
    got = M.hit_rate(pm(*cols), subset_ratio=1.0, iterations=100_000, rng_seed=3)
    assert got == pytest.approx(float(exact), abs=0.01)


def test_half_policy_matches_enumeration():
    a, b = [1, 1, 0, 0, 1], [0, 1, 1, 0, 0]
    exact = exact_hit(a, b, tie_credit=Fraction(1, 2))
    got = M.pairwise_hit(pm(a, b), 0, 1, subset_ratio=1.0, iterations=100_000, tie_policy="half")
    assert got == pytest.approx(float(exact), abs=0.01)


def test_full_set_tie_orients_by_system_id():
    c = np.array([[1, 0], [0, 1], [1, 0], [0, 1]], dtype=np.uint8)
    m_ab = PredictionMatrix("d", list("wxyz"), ["a", "b"], c)
    m_ba = PredictionMatrix("d", list("wxyz"), ["b", "a"], c[:, ::-1])
    pairs_ab = M.pairwise_matrix(m_ab, iterations=300)
    pairs_ba = M.pairwise_matrix(m_ba, iterations=300)
    assert pairs_ab[0][:2] == ("a", "b") == pairs_ba[0][:2]
    assert pairs_ab[0][2] == pairs_ba[0][2]


def test_pairwise_hit_agrees_with_matrix_entry():
    rng = np.random.default_rng(1)
    cols = (rng.random((3, 40)) < [[0.9], [0.7], [0.6]]).astype(int)
    m = pm(*cols)
    matrix = {(a, b): p for a, b, p in M.pairwise_matrix(m, iterations=500)}
    for i, j in combinations(range(3), 2):
        p = M.pairwise_hit(m, i, j, iterations=500)
        assert p in matrix.values()
        better, worse = ("s%d" % i, "s%d" % j) if cols[i].sum() >= cols[j].sum() else ("s%d" % j, "s%d" % i)
        assert matrix[better, worse] == p


def test_determinism_bit_identical():
    rng = np.random.default_rng(5)
    m = pm(*(rng.random((4, 60)) < 0.7).astype(int))
    a = M.bootstrap_correct_counts(m, 0.8, 300, 11)
    b = M.bootstrap_correct_counts(m, 0.8, 300, 11)
    assert np.array_equal(a, b)
    assert M.hit_rate(m, iterations=300, rng_seed=11) == M.hit_rate(m, iterations=300, rng_seed=11)
    assert not np.array_equal(a, M.bootstrap_correct_counts(m, 0.8, 300, 12))


def test_iteration_stream_depends_only_on_seed_and_index():
    rng = np.random.default_rng(2)
    m = pm(*(rng.random((2, 30)) < 0.6).astype(int))
    long = M.bootstrap_correct_counts(m, 0.8, 500, 4)
    short = M.bootstrap_correct_counts(m, 0.8, 120, 4)
    assert np.array_equal(long[:120], short)


def test_subset_size_is_ceiling():
    assert M.subset_size(1000, 0.8) == 800
    assert M.subset_size(10, 0.7) == 7
    assert M.subset_size(7, 0.5) == 4
    assert M.subset_size(3, 1.0) == 3


def test_without_replacement_full_ratio_reproduces_full_set():
    m = pm([1, 1, 0, 1, 0], [0, 1, 1, 0, 0])
    sums = M.bootstrap_correct_counts(m, 1.0, 50, 0, replace=False)
    assert (sums == m.correctness.sum(axis=0)).all()
    # system 0 wins the full set, so every permutation of it is a hit
    assert M.pairwise_hit(m, 0, 1, subset_ratio=1.0, iterations=50, replace=False) == 1.0


def test_without_replacement_subsets_have_distinct_rows():
    n = 12
    eye = np.eye(n, dtype=np.uint8)
    m = PredictionMatrix("d", [str(i) for i in range(n)], [str(j) for j in range(n)], eye)
    sums = M.bootstrap_correct_counts(m, 0.5, 200, 9, replace=False)
    assert sums.max() == 1 and (sums.sum(axis=1) == 6).all()


@pytest.mark.parametrize("kwargs", [{"subset_ratio": 0.0}, {"subset_ratio": 1.5}, {"iterations": 0},
                                    {"tie_policy": "coin"}])
def test_invalid_resampling_arguments(kwargs):
    with pytest.raises(M.InvalidInput):
        M.pairwise_hit(pm([1, 0], [0, 1]), 0, 1, **kwargs)


@pytest.mark.parametrize("i,j", [(0, 0), (0, 2), (-1, 1)])
def test_invalid_pair(i, j):
    with pytest.raises(M.InvalidInput):
        M.pairwise_hit(pm([1, 0], [0, 1]), i, j)


def test_prediction_matrix_validation():
    with pytest.raises(M.InvalidInput):
        pm([1, 2], [0, 1])
    with pytest.raises(M.InvalidInput):
        pm([1, 0])
    m = pm([1, 1, 0, 1], [0, 0, 0, 1])
    assert list(m.accuracies()) == [75.0, 25.0]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=20),
       st.sampled_from(M.TIE_POLICIES), st.integers(0, 2**32))
def test_hit_rate_is_a_probability(rows, policy, seed):
    c = np.array(rows, dtype=np.uint8)
    m = PredictionMatrix("d", [str(i) for i in range(len(rows))], ["a", "b", "c"], c)
    h = M.hit_rate(m, iterations=64, rng_seed=seed, tie_policy=policy)
    assert 0.0 <= h <= 1.0


# spearman


def test_spearman_identity_and_reversal():
    x = [3.0, 1.0, 4.0, 1.5, 9.0]
    assert M.spearman(x, x)[0] == pytest.approx(1.0)
    assert M.spearman([1, 2, 3, 4], [9, 7, 5, 1])[0] == pytest.approx(-1.0)


def test_spearman_reference_board():
    hit = [r[1] for r in BOARD.values()]
    var = [r[2] for r in BOARD.values()]
    sva = [r[3] for r in BOARD.values()]
    # hand computation: 51.5 / sqrt(60 * 59.5) with average ranks for the tied 0.78s
    assert M.spearman(var, hit)[0] == pytest.approx(51.5 / math.sqrt(60 * 59.5), abs=1e-12)
    assert M.spearman(var, hit)[0] == pytest.approx(0.862, abs=0.001)
    assert M.spearman(sva, hit)[0] == pytest.approx(0.795, abs=0.001)


def test_average_ranks():
    assert list(M.average_ranks([10, 20, 20, 5])) == [2.0, 3.5, 3.5, 1.0]


def test_spearman_p_value_from_t_distribution():
    from scipy import stats

    x = [1, 2, 3, 4, 5, 6, 7]
    y = [2, 1, 4, 3, 7, 5, 6]
    rho, p = M.spearman(x, y)
    ref = stats.spearmanr(x, y)
    assert rho == pytest.approx(ref.statistic, abs=1e-12)
    assert p == pytest.approx(ref.pvalue, rel=1e-9)


def test_spearman_errors():
    with pytest.raises(M.InvalidInput):
        M.spearman([1, 2, 3], [1, 2])
    with pytest.raises(M.InvalidInput):
        M.spearman([1, 2], [1, 2])
    with pytest.raises(M.UndefinedCorrelation):
        M.spearman([1, 1, 1], [1, 2, 3])


distinct = st.lists(st.integers(-1000, 1000), min_size=3, max_size=15, unique=True)


@given(distinct, st.data())
def test_spearman_rank_invariance(x, data):
    y = data.draw(st.lists(st.floats(-100, 100), min_size=len(x), max_size=len(x)))
    if len(set(y)) == 1:
        return
    a = M.spearman(x, y)[0]
    b = M.spearman([math.exp(v / 500.0) * 3 + 1 for v in x], y)[0]
    assert b == pytest.approx(a, abs=1e-9)


@given(distinct, st.randoms(use_true_random=False))
def test_spearman_tie_free_formula(x, rnd):
    y = list(x)
    rnd.shuffle(y)
    n = len(x)
    rx = {v: i for i, v in enumerate(sorted(x))}
    ry = {v: i for i, v in enumerate(sorted(y))}
    d2 = sum((rx[a] - ry[b]) ** 2 for a, b in zip(x, y))
    assert M.spearman(x, y)[0] == pytest.approx(1 - 6 * d2 / (n * (n * n - 1)), abs=1e-9)
