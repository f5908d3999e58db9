import itertools
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import rankdata

from cif.evaluation import (
    RESULT_COLUMNS,
    FoldResult,
    OneNearestNeighbour,
    accuracy,
    auroc,
    balanced_accuracy,
    f1_macro,
    holm,
    pairwise_significance,
    read_results,
    run_experiment,
    wilcoxon_signed_rank,
    write_pairwise_csv,
)
from cif.forest import CIFConfig
from cif.synthetic import planted_window
from cif.tsdata import TimeSeriesDataset, write_ts_file


def brute_force_wilcoxon(a, b):
    """Two-sided p by enumerating all 2^n sign assignments of the non-zero differences."""
    d = np.asarray(a, float) - np.asarray(b, float)
    d = d[d != 0]
    n = d.size
    if n == 0:
        return 1.0
    r2 = np.rint(2 * rankdata(np.abs(d))).astype(int)
    obs = int(r2[d > 0].sum())
    le = ge = 0
    for signs in itertools.product((0, 1), repeat=n):
        s = int(np.dot(signs, r2))
        le += s <= obs
        ge += s >= obs
    return min(1.0, 2 * min(le, ge) / 2**n)


def brute_force_auc(scores, positive):
    pos = scores[positive]
    neg = scores[~positive]
    wins = sum((p > q) + 0.5 * (p == q) for p in pos for q in neg)
    return wins / (pos.size * neg.size)


class TestAccuracy:
    def test_examples(self):
        assert accuracy([0, 1, 1], [0, 1, 0]) == pytest.approx(2 / 3)
        assert accuracy([2, 1], [2, 1]) == 1.0
        assert accuracy([0, 0], [1, 1]) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            accuracy([0], [0, 1])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 10), st.integers(2, 4), st.integers(0, 2**31))
    def test_balanced_equals_plain_on_balanced_truth(self, per_class, c, seed):
        rng = np.random.default_rng(seed)
        truth = np.repeat(np.arange(c), per_class)
        pred = rng.integers(0, c, truth.size)
        assert balanced_accuracy(pred, truth) == pytest.approx(accuracy(pred, truth), abs=1e-12)

    def test_f1(self):
        assert f1_macro([0, 0, 1, 1], [0, 0, 1, 1]) == 1.0
        # class 1: p=1/2 r=1 f=2/3; class 0: p=1 r=1/2 f=2/3
        assert f1_macro([0, 1, 1, 1], [0, 0, 1, 1]) == pytest.approx((2 / 3 + 0.8) / 2)
        # a class never predicted and never true does not appear
        assert f1_macro([0, 0], [0, 0]) == 1.0
        # predicted but absent from truth: 0
        assert f1_macro([1, 0], [0, 0]) == pytest.approx((2 / 3 + 0) / 2)


class TestAuroc:
    def test_perfect(self):
        assert auroc([[0.9, 0.1], [0.8, 0.2], [0.3, 0.7], [0.1, 0.9]], [0, 0, 1, 1]) == 1.0

    def test_constant(self):
        assert auroc(np.full((6, 3), 1 / 3), [0, 1, 2, 0, 1, 2]) == 0.5

    @pytest.mark.parametrize("seed", range(10))
    def test_binary_pairs(self, seed):
        rng = np.random.default_rng(seed)
        s = np.round(rng.random(8), 1)
        y = np.array([0, 1] * 4)
        rng.shuffle(y)
        P = np.column_stack([1 - s, s])
        assert auroc(P, y) == pytest.approx(brute_force_auc(s, y == 1), abs=1e-12)

    def test_weighted_ovr(self):
        rng = np.random.default_rng(1)
        P = rng.dirichlet(np.ones(3), size=30)
        y = rng.integers(0, 3, 30)
        expected = sum((y == c).sum() * brute_force_auc(P[:, c], y == c) for c in range(3)) / 30
        assert auroc(P, y) == pytest.approx(expected, abs=1e-12)

    def test_absent_class_weight_zero(self):
        P = np.array([[0.2, 0.7, 0.1], [0.9, 0.05, 0.05], [0.1, 0.8, 0.1]])
        assert auroc(P, [1, 0, 1]) == 1.0

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31))
    def test_monotone_invariance(self, seed):
        rng = np.random.default_rng(seed)
        P = rng.dirichlet(np.ones(3), size=20)
        y = rng.integers(0, 3, 20)
        assert auroc(np.exp(3 * P) - 7, y) == pytest.approx(auroc(P, y), abs=1e-12)


class TestWilcoxon:
    def test_equal(self):
        assert wilcoxon_signed_rank([1, 2, 3], [1, 2, 3]) == 1.0

    def test_all_positive_six(self):
        assert wilcoxon_signed_rank(np.arange(6) + 1.0, np.zeros(6)) == pytest.approx(2 / 64, abs=1e-15)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 12), st.integers(0, 2**31))
    def test_exact_matches_enumeration(self, n, seed):
        rng = np.random.default_rng(seed)
        a = np.round(rng.normal(size=n), 1)
        b = np.round(rng.normal(size=n), 1)
        b[: n // 4] = a[: n // 4]  # some zero differences
        p = wilcoxon_signed_rank(a, b)
        assert p == pytest.approx(brute_force_wilcoxon(a, b), abs=1e-12)
        assert p == wilcoxon_signed_rank(b, a)

    def test_normal_approximation_region(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=40) + 0.5
        b = rng.normal(size=40)
        p = wilcoxon_signed_rank(a, b)
        from scipy.stats import wilcoxon

        ref = wilcoxon(a, b, method="approx", correction=False).pvalue
        assert p == pytest.approx(ref, rel=1e-9)
        assert p == pytest.approx(wilcoxon_signed_rank(b, a), rel=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            wilcoxon_signed_rank([1, 2], [1])


def test_holm():
    adj, sig = holm([0.01, 0.04, 0.03, 0.5])
    np.testing.assert_allclose(adj, [0.04, 0.09, 0.09, 0.5])
    assert sig.tolist() == [True, False, False, False]


def test_pairwise(tmp_path):
    scores = {"A": np.linspace(0.8, 0.9, 8), "B": np.linspace(0.7, 0.8, 8), "C": np.linspace(0.8, 0.9, 8)}
    res = pairwise_significance(scores)
    assert [(r.a, r.b) for r in res] == [("A", "B"), ("A", "C"), ("B", "C")]
    assert res[1].p_value == 1.0 and not res[1].significant
    assert res[0].significant
    write_pairwise_csv(res, tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text().count("\n") == 4


def test_one_nn():
    train = TimeSeriesDataset.from_arrays(np.array([[0, 0, 0], [5, 5, 5.0]]), [0, 1])
    test = TimeSeriesDataset.from_arrays(np.array([[1, 1, 0], [4, 6, 5.0]]), [0, 1])
    nn = OneNearestNeighbour().fit(train)
    assert nn.predict(test).tolist() == [0, 1]
    np.testing.assert_array_equal(nn.predict_proba(test), np.eye(2))


def test_fold_result_validation():
    with pytest.raises(ValueError):
        FoldResult("d", 0, "c", 1.2, 1, 1, 1, 0, 0)
    with pytest.raises(ValueError):
        FoldResult("d", -1, "c", 1, 1, 1, 1, 0, 0)


@pytest.fixture(scope="module")
def ts_pair(tmp_path_factory):
    d = tmp_path_factory.mktemp("exp")
    data = planted_window(n=40, m=30, window=(10, 20), seed=4)
    write_ts_file(data.subset(range(16)), d / "P_TRAIN.ts")
    write_ts_file(data.subset(range(16, 40)), d / "P_TEST.ts")
    return d / "P_TRAIN.ts", d / "P_TEST.ts"


METRICS = ["accuracy", "balanced_accuracy", "auroc", "f1", "train_estimate"]


class TestExperiment:
    def test_single_fold_is_original_split(self, ts_pair, tmp_path):
        from cif.forest import fit, predict
        from cif.tsdata import parse_ts_file

        cfg = CIFConfig(num_trees=10)
        res = run_experiment(*ts_pair, cfg, folds=1, out_csv=tmp_path / "r.csv")
        assert len(res) == 1 and res[0].fold == 0
        tr, te = parse_ts_file(ts_pair[0]), parse_ts_file(ts_pair[1])
        direct = np.mean(predict(fit(tr, cfg), te) == te.y())
        assert res[0].accuracy == direct
        rows = read_results(tmp_path / "r.csv")
        assert len(rows) == 1 and tuple(rows[0]) == RESULT_COLUMNS

    def test_rerun_identical_and_merge(self, ts_pair, tmp_path):
        cfg = CIFConfig(num_trees=5, bagging=True)
        a = run_experiment(*ts_pair, cfg, folds=3, out_csv=tmp_path / "a.csv")
        b = run_experiment(*ts_pair, cfg, folds=3, out_csv=tmp_path / "b.csv")
        assert [[getattr(r, k) for k in METRICS] for r in a] == [[getattr(r, k) for k in METRICS] for r in b]
        assert all(r.train_estimate is not None for r in a)
        run_experiment(*ts_pair, "1nn", folds=3, out_csv=tmp_path / "a.csv")
        rows = read_results(tmp_path / "a.csv")
        assert len(rows) == 6
        assert [(r["fold"], r["classifier"]) for r in rows][:2] == [("0", "1nn"), ("0", "CIF")]

    def test_thirty_folds_shape(self, ts_pair):
        res = run_experiment(*ts_pair, "1nn", folds=30)
        assert [r.fold for r in res] == list(range(30))

    def test_error_context(self, ts_pair, tmp_path):
        with pytest.raises(OSError):
            run_experiment(tmp_path / "missing.ts", ts_pair[1], "1nn", folds=1)
