import mpmath
import pytest
from gmpy2 import mpq

from negdim.exact import DensePoly, to_mpf
from negdim.series import (algebraic_branch_series, beta_k, cardano_ground_state, cardano_series,
                           check_factorization, leading_coeff_check, partial_sum, series_generate)
from negdim.spectral import PotentialError, PotentialSpec

# one-dimensional quartic oscillator, H = p^2/2 + x^2/2 + g x^4: ground state
# (even) and first excited state (odd, the three-dimensional s-wave)
EVEN_1D = ["1/2", "3/4", "-21/8", "333/16", "-30885/128", "916731/256",
           "-65518401/1024", "2723294673/2048", "-1030495099053/32768"]
ODD_1D = ["3/2", "15/4", "-165/8", "3915/16", "-520485/128"]


@pytest.fixture(scope="module")
def t20():
    return series_generate(K=20)


def test_one_dimensional_coefficients(t20):
    assert t20.at(1)[:9] == [mpq(s) for s in EVEN_1D]
    assert t20.at(3)[:5] == [mpq(s) for s in ODD_1D]


def test_low_orders(t20):
    D = DensePoly.gen("D")
    assert t20.terms[0] == D * mpq(1, 2)
    assert t20.terms[1] == D * (D + 2) * mpq(1, 4)


def test_factorization_and_degree(t20):
    assert all(a and b for a, b in check_factorization(t20).values())
    assert all(p(0) == 0 and p(-2) == 0 for p in t20.terms[1:])


def test_leading_coefficient_closed_form(t20):
    assert all(leading_coeff_check(t20).values())
    for k in (1, 2, 7, 20):
        with mpmath.workdps(40):
            ref = (-1) ** (k + 1) * 2 ** (k - 2) * mpmath.gamma((3 * k - 1) / mpmath.mpf(2)) \
                / (mpmath.factorial(k + 1) * mpmath.gamma((k + 1) / mpmath.mpf(2)))
            assert abs(to_mpf(beta_k(k), 130) / ref - 1) < mpmath.mpf(10) ** -35


def test_gauge_does_not_change_energies():
    a = series_generate(K=8)
    b = series_generate(K=8, gauge=lambda k: mpq(k * k + 1, 3))
    assert a.terms == b.terms


def test_negative_even_dimension_is_algebraic(t20):
    for M in (2, 3, 4):
        assert t20.at(-2 * M) == algebraic_branch_series(M, 20)
    assert t20.at(-4)[:13] == cardano_series(12)


def test_cubic_root_oracle():
    # the D = -4 ground state is the real root of E^3 - 4E - 16g near -2
    g = mpmath.mpf("0.003")
    with mpmath.workdps(30):
        roots = mpmath.polyroots([1, 0, -4, -16 * g], extraprec=60)
        target = min((r for r in roots if abs(mpmath.im(r)) < 1e-25), key=lambda r: abs(r + 2))
        s = partial_sum(series_generate(K=12).at(-4), g)
        assert abs(s - target) < mpmath.mpf(10) ** -20
        assert abs(cardano_ground_state(g, order=12, prec=100).value - target) < mpmath.mpf(10) ** -25


def test_exact_order_six_at_minus_four(t20):
    assert t20.at(-4)[6] == mpq(3003, 8)


def test_sextic_series_factorization():
    # for r^6 the degree in D grows like 2k + 1 instead of k + 1
    t = series_generate(PotentialSpec.sextic(), K=8)
    assert all(div for _, div in check_factorization(t).values())
    assert [p.degree for p in t.terms[1:]] == [2 * k + 1 for k in range(1, 9)]
    assert t.at(-6) == algebraic_branch_series(3, 8, PotentialSpec.sextic())


def test_non_perturbative_potential_rejected():
    with pytest.raises(PotentialError):
        series_generate(PotentialSpec.random(1), K=3)
