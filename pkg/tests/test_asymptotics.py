import mpmath
import pytest
from gmpy2 import mpq

from negdim.asymptotics import (AsymptoticModel, SingularityError, closed_form_M2, closed_form_M3,
                                consistency_identity_M2, convergence_report, digamma_asymptote,
                                exact_M2_certificate, general_D, geometric_mean_asymptote,
                                predict_root_offset, predict_root_offset_M2_closed,
                                radius_estimate, resultant_E, root_product_asymptote,
                                root_product_gamma_form, singularity_data, special_D,
                                special_D_M2_closed, squarefree_part)
from negdim.exact import DensePoly, to_mpf
from negdim.reference import quartic_tilde_reference
from negdim.roots import root_distribution_stats
from negdim.series import algebraic_branch_series
from negdim.spectral import PotentialSpec, spectral_poly_spin

TINY = mpmath.mpf(10) ** -30


def test_resultant_for_the_cubic():
    # monic R_2 = E^3 - 4E - 16g has discriminant 256 - 6912 g^2
    R = spectral_poly_spin(2, PotentialSpec.quartic()).poly
    sq = squarefree_part(resultant_E(R))
    g = DensePoly.gen("g")
    assert sq * (1 / sq.leading) == (g * g - mpq(1, 27))


def test_exact_double_root_certificate():
    cert = exact_M2_certificate()
    assert cert["R"] and cert["RE"]
    assert cert["c"].b == 0 and cert["c"].a == mpq(8, 9)
    assert all(consistency_identity_M2().values())


def test_M3_against_independent_newton():
    R = quartic_tilde_reference()[3]
    ev = lambda p: (lambda E, g: p.evaluate({"E": E, "g": g}))
    f, fE = ev(R), ev(R.diff("E"))
    fg, fEE = ev(R.diff("g")), ev(R.diff("E").diff("E"))
    with mpmath.workprec(256):
        E0, g0 = mpmath.findroot([f, fE], (mpmath.mpf(-2.4), mpmath.mpf(0.08)))
        c = 2 * g0 * fg(E0, g0) / fEE(E0, g0)
        sd = singularity_data(3)
        cf = closed_form_M3(256)
        for key, ref in (("E0", E0), ("g0", g0), ("c", c)):
            assert abs(getattr(sd, key) - ref) < TINY
            assert abs(cf[key] - ref) < TINY


def test_M2_numeric_matches_closed_form():
    with mpmath.workprec(256):
        sd = singularity_data(2)
        cf = closed_form_M2(256)
        assert max(abs(sd.E0 - cf["E0"]), abs(sd.g0 - cf["g0"]), abs(sd.c - cf["c"])) < TINY
        assert sd.residual_R < TINY and sd.residual_RE < TINY


def test_singularity_needs_M_at_least_two():
    with pytest.raises(SingularityError):
        singularity_data(1)


def test_closed_offset_formula_is_the_M2_case():
    with mpmath.workdps(40):
        for k in (11, 30, 60):
            a, b = predict_root_offset(2, k), predict_root_offset_M2_closed(k)
            assert abs(a / b - 1) < mpmath.mpf(10) ** -35


def test_special_D_closed_form():
    with mpmath.workdps(40):
        cf = closed_form_M2(200)
        for k in (5, 40):
            assert abs(special_D(k, cf["c"], cf["g0"]) / special_D_M2_closed(k) - 1) < mpmath.mpf(10) ** -35


def test_general_D_vanishes_at_negative_even_dimension():
    assert general_D(-4, 3) == 0 and general_D(-6, 9, False) == 0
    assert general_D(1, 5) != 0


def test_root_product_forms_agree_asymptotically():
    with mpmath.workdps(30):
        r = [root_product_gamma_form(k) / root_product_asymptote(k) for k in (20, 40, 80)]
        assert abs(r[2] - 1) < abs(r[1] - 1) < abs(r[0] - 1) < 0.05


def test_convergence_report_monotone_flag():
    rows = convergence_report([1, 2, 3], [2, 3, 5], lambda k: mpmath.mpf(k + 1))
    assert [r["monotone"] for r in rows] == [True, True, False]
    m = AsymptoticModel("nu-offset", {"M": 2})
    assert abs(m(None, 20) / predict_root_offset(2, 20) - 1) < 1e-12


def test_radius_from_branch_series():
    # observed deviation 1.3e-4 (M=2) and 1.7e-4 (M=3) from |g0| at orders 40..60
    with mpmath.workprec(128):
        for M, cf in ((2, closed_form_M2), (3, closed_form_M3)):
            r = radius_estimate(algebraic_branch_series(M, 60), 40, 60)
            assert abs(r / abs(cf(128)["g0"]) - 1) < 1e-3


# ---------------------------------------------------------------------------
# checks against the K = 60 series and its certified roots


@pytest.mark.slow
def test_special_D_ratio_approaches_one_from_above(series60):
    with mpmath.workdps(30):
        r = [to_mpf(series60.terms[k](-4)) / special_D_M2_closed(k) for k in range(30, 61)]
    assert all(x > 1 for x in r)
    assert all(a > b for a, b in zip(r, r[1:]))
    assert r[-1] - 1 < 0.01          # observed 0.0051


@pytest.mark.slow
def test_one_over_k_term_improves_D1(series60):
    with mpmath.workdps(30):
        for k in range(10, 61):
            ex = to_mpf(series60.terms[k](1))
            assert abs(ex / general_D(1, k, True) - 1) < abs(ex / general_D(1, k, False) - 1)
        assert abs(to_mpf(series60.terms[60](1)) / general_D(1, 60, True) - 1) < 0.002  # observed 6e-4


@pytest.mark.slow
def test_coefficient_signs(series60):
    assert all(series60.terms[k](-4) > 0 for k in range(1, 61))
    assert all((series60.terms[k](1) > 0) == (k % 2 == 1) for k in range(1, 61))


@pytest.mark.slow
def test_root_statistics_at_order_60(root_sweep):
    sets, _ = root_sweep
    rs = sets[60]
    st = root_distribution_stats(rs, D=1)
    with mpmath.workprec(rs.bits):
        # partial fractions over the 59 non-stable roots vs (1/2)[ln 6k - psi(D/2+2)]:
        # observed -0.9%
        assert abs(st["digamma_lhs"] / digamma_asymptote(1, 60) - 1) < 0.10
        assert abs(st["digamma_lhs"] - to_mpf(st["digamma_exact"], rs.bits)) < TINY
        # geometric mean: observed 1.3e-4; product: observed 0.8%
        assert abs(st["geometric_mean"] / geometric_mean_asymptote(60) - 1) < 1e-3
        prod = [to_mpf(root_distribution_stats(sets[k])["product"]) / root_product_asymptote(k)
                for k in (40, 50, 60)]
        assert all(x > 1 for x in prod) and prod[0] > prod[1] > prod[2]
        assert prod[2] - 1 < 0.015
