import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from negdim.exact import DensePoly, to_mpf
from negdim.roots import (RootNonConvergence, classify_roots, conjugate_closed, deflate,
                          find_all_roots, root_distribution_stats, vieta_check)
from negdim.series import series_generate

x = DensePoly.gen("D")


def _from_roots(rs):
    p = DensePoly([1], "D")
    for r in rs:
        p = p * (x - r)
    return p


def test_integer_roots_of_high_degree():
    p = _from_roots(range(1, 21))
    rs = find_all_roots(p, stable_roots=(), classify=False)
    with mpmath.workprec(rs.bits):
        got = sorted(mpmath.re(r.value) for r in rs.roots)
        assert all(abs(a - b) < mpmath.mpf(10) ** -25 for a, b in zip(got, range(1, 21)))
    assert all(r.residual <= r.bound for r in rs.roots)


def test_complex_roots_and_conjugate_pairs():
    p = (x * x + 1) * (x * x - 2 * x + 5) * (x - mpq(1, 3))
    rs = find_all_roots(p, stable_roots=(), classify=False)
    assert conjugate_closed(rs)
    assert all(vieta_check(rs).values())
    with mpmath.workprec(rs.bits):
        want = [mpmath.mpc(0, 1), mpmath.mpc(0, -1), mpmath.mpc(1, 2), mpmath.mpc(1, -2), mpmath.mpf(1) / 3]
        for w in want:
            assert min(abs(r.value - w) for r in rs.roots) < mpmath.mpf(10) ** -30


@given(st.lists(st.integers(-30, 30), min_size=3, max_size=10).filter(lambda c: c[-1] != 0))
@settings(max_examples=25, deadline=None)
def test_against_mpmath_polyroots(cs):
    p = DensePoly(cs, "D")
    if p.degree < 1:
        return
    rs = find_all_roots(p, stable_roots=(), classify=False)
    ref = mpmath.polyroots(list(reversed(cs)), maxsteps=200, extraprec=200)
    for r in ref:
        assert min(abs(mpmath.mpc(z.value) - r) for z in rs.roots) < 1e-8 * max(1, abs(r))
    assert conjugate_closed(rs)


def test_stable_roots_are_divided_out():
    p = x * (x + 2) * (x - 5) * (x + 7)
    q, removed = deflate(p, (0, -2))
    assert sorted(removed) == [-2, 0]
    assert q == (x - 5) * (x + 7)
    rs = find_all_roots(p)
    assert [r.label for r in rs.stable] == ["stable-zero", "stable-zero"]
    assert len(rs.roots) == 2


def test_tiny_cluster_offset_keeps_relative_accuracy():
    eps = mpq(1, 10 ** 40)
    p = (x + 4 - eps) * (x - 1) * (x + 9) * (x * x + x + 3)
    rs = find_all_roots(p, stable_roots=())
    cl = rs.cluster(2)
    assert len(cl) == 1
    with mpmath.workprec(rs.bits):
        assert abs(cl[0].offset / to_mpf(eps, rs.bits) - 1) < mpmath.mpf(10) ** -30


def test_cluster_window_and_strictness():
    p = (x + mpq(9, 2)) * (x + 8 + mpq(1, 10)) * (x - 3)
    rs = find_all_roots(p, stable_roots=(), window=1.0)
    labels = {str(mpmath.nstr(mpmath.re(r.value), 5)): r.label for r in rs.roots}
    assert labels == {"-8.1": "cluster(-8)", "-4.5": "cluster(-4)", "3.0": "bulk"}
    classify_roots(rs, window=0.2)
    assert [r.label for r in rs.roots] == ["cluster(-8)", "bulk", "bulk"]


def test_quartic_series_roots_k7():
    t = series_generate(K=7)
    rs = find_all_roots(t.terms[7], k=7)
    cl = rs.cluster(2)
    assert len(cl) == 2 and conjugate_closed(rs)
    with mpmath.workprec(rs.bits):
        assert abs(mpmath.re(cl[0].value) + mpmath.mpf("3.6308337")) < 1e-6


def test_statistics_are_exact_where_possible():
    t = series_generate(K=12)
    P = t.P(12)
    rs = find_all_roots(P, stable_roots=())
    st_ = root_distribution_stats(rs, D=1)
    with mpmath.workprec(rs.bits):
        prod = mpmath.fprod(mpmath.mpc(r.value) for r in rs.roots)
        assert abs(prod - to_mpf(st_["product"])) < abs(prod) * mpmath.mpf(10) ** -30
        exact = to_mpf(st_["digamma_exact"], rs.bits)
        assert abs(st_["digamma_lhs"] - exact) < mpmath.mpf(10) ** -30


def test_precision_cap(monkeypatch):
    monkeypatch.setenv("NEGDIM_MAX_BITS", "64")
    with pytest.raises(RootNonConvergence):
        find_all_roots(_from_roots([1, 2, 3]), stable_roots=())


def test_bad_input():
    with pytest.raises(ValueError):
        find_all_roots(DensePoly([], "D"))
    with pytest.raises(ValueError):
        find_all_roots(DensePoly([3], "D"), stable_roots=())


def test_deterministic():
    t = series_generate(K=15)
    a = find_all_roots(t.terms[15], k=15)
    b = find_all_roots(t.terms[15], k=15)
    assert [r.value for r in a.roots] == [r.value for r in b.roots]
