import pytest
from hypothesis import given, strategies as st

from cito.stats import average_ranks, wilcoxon_signed_rank

from oracles import sign_enumeration_p


def test_five_positive_differences():
    r = wilcoxon_signed_rank([1, 2, 3, 4, 5])
    assert r.w_minus == 0 and r.statistic == 0
    assert r.p_value == 0.0625
    assert r.decision == "retain"


def test_symmetric_pair():
    assert wilcoxon_signed_rank([1, -1]).p_value == 1.0


def test_identical_samples():
    r = wilcoxon_signed_rank([3, 1, 2], [3, 1, 2])
    assert r.n == 0 and r.p_value is None and r.decision == "no nonzero differences"


def test_reject_below_alpha():
    r = wilcoxon_signed_rank(list(range(1, 11)))
    assert r.p_value == pytest.approx(2 / 1024) and r.decision == "reject"


def test_empty_input():
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([])


def test_average_ranks_with_ties():
    assert average_ranks([3, 1, 3, 2]) == [3.5, 1.0, 3.5, 2.0]


def test_large_sample_uses_normal_approximation():
    diffs = [((-1) ** k) * (k % 7 + 1) + 0.5 for k in range(40)]
    r = wilcoxon_signed_rank(diffs)
    assert r.method == "normal" and 0.0 <= r.p_value <= 1.0


def test_normal_matches_scipy_convention():
    scipy_stats = pytest.importorskip("scipy.stats")
    diffs = [(k * 37 % 23) - 9.5 for k in range(30)]
    ours = wilcoxon_signed_rank(diffs).p_value
    theirs = scipy_stats.wilcoxon(diffs, method="approx", correction=True).pvalue
    assert ours == pytest.approx(theirs, rel=1e-9)


@given(st.lists(st.integers(-6, 6), min_size=1, max_size=12))
def test_exact_matches_sign_enumeration(diffs):
    r = wilcoxon_signed_rank(diffs)
    if all(d == 0 for d in diffs):
        assert r.p_value is None
        return
    assert r.method == "exact"
    assert r.p_value == pytest.approx(sign_enumeration_p(diffs), abs=1e-12)
    assert 0.0 <= r.p_value <= 1.0
    assert r.reject == (r.p_value < 0.05)
