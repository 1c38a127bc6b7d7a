"""Exact D-parametric perturbation series E^(k)(D) for V = r^2/2 + g U(r^2).

Ansatz psi = exp(-zeta) * sum_k g^k A_k(zeta), A_0 = 1.  Writing
V(2 zeta) = zeta + g u(zeta), order g^k of the zeta-equation reads

    -zeta A_k'' + (2 zeta - D/2) A_k' = -u A_{k-1} + sum_{m=1}^{k} E^(m) A_{k-m}

and on zeta^n coefficients

    2n a_{k,n} - (n+1)(n + D/2) a_{k,n+1} = rhs_n,

solved from the top degree downward.  The zeta^0 row then fixes E^(k).
All coefficients are exact polynomials in D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
from gmpy2 import mpq

from .exact import ONE, ZERO, DensePoly, Q, SparsePoly, to_mpf
from .spectral import PotentialSpec, quartic_tilde, spectral_poly_spin


# Plain coefficient lists are used in the inner loops; DensePoly wraps results.

def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    r = list(a)
    for i, x in enumerate(b):
        r[i] += x
    while r and not r[-1]:
        r.pop()
    return r


def _pmul(a, b):
    if not a or not b:
        return []
    r = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                r[i + j] += x * y
    return r


def _pscale(a, c):
    return [x * c for x in a] if c else []


@dataclass
class SeriesTable:
    K: int
    potential: PotentialSpec
    terms: list
    factored: list
    layers: list = field(default_factory=list, repr=False)

    def at(self, D) -> list:
        """E^(k) at an exact D for k = 0..K."""
        return [p(Q(D)) for p in self.terms]

    def P(self, k: int) -> DensePoly:
        if k < 1:
            raise ValueError("P_k is defined for k >= 1")
        return self.factored[k - 1]


def _layers(u: dict, K: int, gauge=None):
    """Generate (E_k coefficient lists, A_k layers).

    ``gauge`` optionally fixes a_{k,0} = gauge(k) (a D-independent rational)
    for k >= 1; the default is a_{k,0} = 0.
    """
    half = mpq(1, 2)
    A = [[[ONE]]]
    E = [[ZERO, half]]
    top = max(u) if u else 0
    for k in range(1, K + 1):
        deg = top * k
        prev = A[k - 1]
        rhs = [[] for _ in range(deg + 1)]
        for n in range(deg + 1):
            s = []
            for m, um in u.items():
                if 0 <= n - m < len(prev) and prev[n - m]:
                    s = _padd(s, _pscale(prev[n - m], -um))
            for m in range(1, k):
                layer = A[k - m]
                if n < len(layer) and layer[n]:
                    s = _padd(s, _pmul(E[m], layer[n]))
            rhs[n] = s
        a = [[] for _ in range(deg + 2)]
        for n in range(deg, 0, -1):
            carry = _pmul([mpq(n * (n + 1)), mpq(n + 1, 2)], a[n + 1])
            a[n] = _pscale(_padd(rhs[n], carry), mpq(1, 2 * n))
        c0 = Q(gauge(k)) if gauge is not None else ZERO
        a[0] = [c0] if c0 else []
        # zeta^0 row: -(D/2) a_{k,1} = rhs_0 + E^(k) a_{0,0}, and rhs_0 carries
        # sum_{m<k} E^(m) a_{k-m,0}; with a_{k,0} = 0 that sum is empty.
        Ek = _padd(_pmul([ZERO, -half], a[1]), _pscale(rhs[0], -ONE))
        E.append(Ek)
        A.append(a[:deg + 1])
    return E, A


def series_generate(potential: PotentialSpec | None = None, K: int = 10, gauge=None,
                    keep_layers: bool = False) -> SeriesTable:
    """E^(0..K)(D) as exact polynomials in D."""
    potential = potential or PotentialSpec.quartic()
    u = potential.perturbation()
    if K < 0:
        raise ValueError("K must be >= 0")
    E, A = _layers(u, K, gauge)
    terms = [DensePoly(e, "D") for e in E]
    dd2 = DensePoly([0, 2, 1], "D")
    factored = [terms[k].exquo(dd2) for k in range(1, K + 1)]
    layers = []
    if keep_layers:
        for layer in A:
            layers.append([DensePoly(c, "D") for c in layer])
    return SeriesTable(K, potential, terms, factored, layers)


def check_factorization(table: SeriesTable) -> dict:
    """Degree k+1 and exact divisibility by D(D+2) for every k >= 1."""
    dd2 = DensePoly([0, 2, 1], "D")
    out = {}
    for k in range(1, table.K + 1):
        t = table.terms[k]
        out[k] = (t.degree == k + 1, dd2.divides_exactly(t))
    return out


# ---------------------------------------------------------------------------
# Leading coefficients of P_k


def gamma_half_integer(twice: int):
    """Gamma(twice/2) as (rational, has_sqrt_pi)."""
    if twice <= 0:
        raise ValueError("argument must be positive")
    if twice % 2 == 0:
        return mpq(math.factorial(twice // 2 - 1)), False
    n = (twice - 1) // 2
    return mpq(math.factorial(2 * n), 4 ** n * math.factorial(n)), True


def beta_k(k: int):
    """(-1)^{k+1} 2^{k-2} Gamma((3k-1)/2) / ((k+1)! Gamma((k+1)/2)), exactly."""
    num, s1 = gamma_half_integer(3 * k - 1)
    den, s2 = gamma_half_integer(k + 1)
    if s1 != s2:
        raise ArithmeticError("sqrt(pi) factors do not cancel")
    sign = 1 if (k + 1) % 2 == 0 else -1
    return sign * (mpq(2) ** (k - 2)) * num / (math.factorial(k + 1) * den)


def leading_coeff_check(table: SeriesTable) -> dict:
    return {k: table.P(k).leading == beta_k(k) for k in range(1, table.K + 1)}


# ---------------------------------------------------------------------------
# Ground state at D = -4 in closed form


@dataclass
class CardanoResult:
    value: object
    series: list
    ambiguous: bool


def cardano_series(order: int) -> list:
    """Taylor coefficients of the ground-state root of E^3 - 4E - 16g = 0,
    E(0) = -2.

    With E = -2 + x the equation becomes g = x (x^2 - 6x + 8) / 16, and the
    coefficients follow from Lagrange inversion:
    [g^k] x = (1/k) [x^{k-1}] (16 / (x^2 - 6x + 8))^k.
    """
    n = order
    # phi(x) = 16 / (8 - 6x + x^2) as a truncated power series
    denom = [mpq(8), mpq(-6), mpq(1)]
    phi = [ZERO] * n
    if n:
        inv = [ZERO] * n
        inv[0] = ONE / denom[0]
        for i in range(1, n):
            acc = ZERO
            for j in (1, 2):
                if i - j >= 0:
                    acc += denom[j] * inv[i - j]
            inv[i] = -acc / denom[0]
        phi = [16 * c for c in inv]
    out = [mpq(-2)]
    power = [ONE] + [ZERO] * (n - 1)
    for k in range(1, order + 1):
        power = _trunc_mul(power, phi, n)
        out.append(power[k - 1] / k)
    return out


def _trunc_mul(a, b, n):
    r = [ZERO] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j in range(n - i):
                if j < len(b) and b[j]:
                    r[i + j] += x * b[j]
    return r


def cardano_value(g, prec: int = 53):
    """Ground-state energy at D = -4 from the trigonometric Cardano branch.

    eps = 2 Re[((-sqrt3 + i)/2) * cbrt(sqrt(1 - h^2) - i h)], h = 3^{3/2} g,
    E = 2 eps / sqrt3.  Returns (E, ambiguous) where ambiguous is true beyond
    the branch point |h| > 1.
    """
    with mpmath.workprec(prec):
        gg = to_mpf(g) if not isinstance(g, (mpmath.mpf, float, int)) else mpmath.mpf(g)
        s3 = mpmath.sqrt(3)
        h = s3 ** 3 * gg
        w = mpmath.sqrt(1 - h * h) - 1j * h
        eps = 2 * mpmath.re(mpmath.mpc(-s3, 1) / 2 * mpmath.cbrt(w))
        return 2 * eps / s3, bool(abs(h) > 1)


def cardano_ground_state(g, order: int = 7, prec: int = 53) -> CardanoResult:
    value, amb = cardano_value(g, prec)
    return CardanoResult(value, cardano_series(order), amb)


# ---------------------------------------------------------------------------
# Implicit branch series of R_M(E, g) = 0 at any M


def algebraic_branch_series(M: int, K: int, potential: PotentialSpec | None = None) -> list:
    """Taylor coefficients of the root of R_M(E, g) through E(0) = -M.

    Newton iteration in Q[[g]] with precision doubling.  For M = 0, 1 the
    polynomial is g-independent and the series is constant.
    """
    if M < 0:
        raise ValueError("M must be >= 0")
    potential = potential or PotentialSpec.quartic()
    R = spectral_poly_spin(M, potential).poly
    # cE[i] is the coefficient of E^i as a DensePoly in g
    cE = [c.to_dense() for c in R.coefficients_in("E")]
    E0 = mpq(-M)
    f0 = sum((c(ZERO) * E0 ** i for i, c in enumerate(cE)), ZERO)
    if f0 != 0:
        raise ArithmeticError(f"E = {-M} is not a root of R_{M}(E, 0)")
    df0 = sum((i * c(ZERO) * E0 ** (i - 1) for i, c in enumerate(cE) if i), ZERO)
    if df0 == 0:
        raise ArithmeticError("branch point at g = 0")
    n_target = K + 1
    e = [E0]
    prec_now = 1
    while prec_now < n_target:
        prec_now = min(2 * prec_now, n_target)
        e = e + [ZERO] * (prec_now - len(e))
        f, df = _eval_and_diff(cE, e, prec_now)
        inv = _series_inverse(df, prec_now)
        corr = _trunc_mul(f, inv, prec_now)
        e = [a - b for a, b in zip(e, corr)]
    return e[:n_target]


def _eval_and_diff(cE, e, n):
    """R(E(g), g) and dR/dE(E(g), g) as truncated series (Horner in E)."""
    f = [ZERO] * n
    df = [ZERO] * n
    for c in reversed(cE):
        # df = df*e + f ; f = f*e + c(g)
        df = [a + b for a, b in zip(_trunc_mul(df, e, n), f)]
        f = _trunc_mul(f, e, n)
        for i, x in enumerate(c.coeffs[:n]):
            f[i] += x
    return f, df


def _series_inverse(a, n):
    if not a[0]:
        raise ZeroDivisionError("series not invertible")
    inv = [ZERO] * n
    inv[0] = ONE / a[0]
    for i in range(1, n):
        acc = ZERO
        for j in range(1, i + 1):
            if j < len(a) and a[j]:
                acc += a[j] * inv[i - j]
        inv[i] = -acc * inv[0]
    return inv


def partial_sum(coeffs, g):
    """sum_k c_k g^k in mpmath at current precision."""
    acc = mpmath.mpf(0)
    gp = mpmath.mpf(1)
    for c in coeffs:
        acc += to_mpf(c) * gp
        gp *= g
    return acc
