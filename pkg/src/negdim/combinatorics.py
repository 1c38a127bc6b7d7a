"""Degeneracies m(D, l), n(j, M), n~(j, M) and the exact identities linking
the continued partition function at D = -2M to spin-j traces.

Spins are passed as two_j (an integer) throughout.
"""

from __future__ import annotations

from math import factorial

import mpmath
from gmpy2 import mpq

from .exact import ONE, ZERO, DensePoly, Q


def _falling_factor_poly(l: int) -> DensePoly:
    """prod_{i=-1}^{l-3} (D + i) as a polynomial in D (empty product = 1)."""
    out = DensePoly([1], "D")
    for i in range(-1, l - 2):
        out = out * DensePoly([i, 1], "D")
    return out


def degeneracy_m_poly(l: int):
    """m(D, l) as an exact polynomial in D.

    For integer D >= 2 this is (2l + D - 2)(l + D - 3)! / (l! (D - 2)!),
    written as (2l + D - 2)/l! * (D-1) D ... (D+l-3) which is polynomial,
    with m(D, 0) = 1.
    """
    if l < 0:
        raise ValueError("l must be nonnegative")
    if l == 0:
        return DensePoly([1], "D")
    return DensePoly([2 * l - 2, 1], "D") * _falling_factor_poly(l) * mpq(1, factorial(l))


def degeneracy_m(D, l: int):
    """m(D, l); ``D`` exact (returns a rational) or None / "D" (returns the
    polynomial in D)."""
    p = degeneracy_m_poly(l)
    if D is None or D == "D":
        return p
    return p(Q(D))


def degeneracy_m_continuation(D, l: int):
    """(-1)^{l-1} (2l + D - 2)/l! * Gamma(2 - D)/Gamma(3 - D - l).

    The Gamma ratio is the finite product (1-D)(-D)...(3-D-l), so exact D
    gives an exact rational even where the Gammas have poles; non-exact D is
    evaluated with mpmath Gammas.
    """
    if l < 0:
        raise ValueError("l must be nonnegative")
    sign = 1 if (l - 1) % 2 == 0 else -1
    try:
        d = Q(D)
    except TypeError:
        d = None
    if d is not None:
        ratio = ONE
        for i in range(1, l):          # Gamma(a)/Gamma(a-l+1), a = 2 - D
            ratio *= (2 - d - i)
        if l == 0:
            # Gamma(2-D)/Gamma(3-D) = 1/(2-D)
            if d == 2:
                return ONE            # removable: m(D, 0) = 1 identically
            ratio = ONE / (2 - d)
        return sign * (2 * l + d - 2) * ratio / factorial(l)
    x = mpmath.mpf(D)
    return sign * (2 * l + x - 2) / mpmath.factorial(l) * mpmath.gamma(2 - x) * mpmath.rgamma(3 - x - l)


# ---------------------------------------------------------------------------
# n(j, M) and n~(j, M)


def n_closed(two_j: int, M: int) -> int:
    """2(2j+1)(2M+1)! / ((M-2j)! (M+2j+2)!) for 0 <= 2j <= M, else 0."""
    if two_j < 0 or two_j > M:
        return 0
    num = 2 * (two_j + 1) * factorial(2 * M + 1)
    den = factorial(M - two_j) * factorial(M + two_j + 2)
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError("n(j, M) is not an integer")
    return q


def n_tilde_closed(two_j: int, M: int) -> int:
    """((-1)^{M+2j} + 1)/2 * (2j+1) M! / ((M/2 + j + 1)! (M/2 - j)!)."""
    if two_j < 0 or two_j > M or (M + two_j) % 2:
        return 0
    a = (M + two_j) // 2
    b = (M - two_j) // 2
    q, r = divmod((two_j + 1) * factorial(M), factorial(a + 1) * factorial(b))
    if r:
        raise ArithmeticError("n~(j, M) is not an integer")
    return q


def n_recursion_table(max_M: int) -> list:
    """n(j, M) for M = 0..max_M from n(j, M+1) = 2n(j,M) + n(j-1/2,M) + n(j+1/2,M)."""
    rows = [{0: 1}]
    for M in range(max_M):
        prev = rows[-1]
        row = {}
        for tj in range(0, M + 2):
            v = 2 * prev.get(tj, 0) + prev.get(tj - 1, 0) + prev.get(tj + 1, 0)
            if v:
                row[tj] = v
        rows.append(row)
    return rows


def n_tilde_recursion_table(max_M: int) -> list:
    """n~(j, M) from n~(j, M+1) = n~(j-1/2, M) + n~(j+1/2, M)."""
    rows = [{0: 1}]
    for M in range(max_M):
        prev = rows[-1]
        row = {}
        for tj in range(0, M + 2):
            v = prev.get(tj - 1, 0) + prev.get(tj + 1, 0)
            if v:
                row[tj] = v
        rows.append(row)
    return rows


def degeneracy_nj(M: int) -> dict:
    """Closed-form tables {two_j: value} for n and n~ at one M."""
    if M < 0:
        raise ValueError("M must be nonnegative")
    return {
        "n": {tj: n_closed(tj, M) for tj in range(M + 1) if n_closed(tj, M)},
        "n_tilde": {tj: n_tilde_closed(tj, M) for tj in range(M + 1) if n_tilde_closed(tj, M)},
    }


def dimension_sums(M: int) -> dict:
    t = degeneracy_nj(M)
    return {
        "n": sum((tj + 1) * v for tj, v in t["n"].items()),
        "n_tilde": sum((tj + 1) * v for tj, v in t["n_tilde"].items()),
    }


def brute_force_decomposition(M: int, site_spins=(0, 0, 1)) -> dict:
    """Multiplicities in the M-fold tensor power of a direct sum of spins
    (given as two_j values), by repeated Clebsch-Gordan tensoring."""
    mult = {0: 1}
    for _ in range(M):
        nxt = {}
        for tj, m in mult.items():
            for s in site_spins:
                for t in range(abs(tj - s), tj + s + 1, 2):
                    nxt[t] = nxt.get(t, 0) + m
        mult = nxt
    return dict(sorted(mult.items()))


# ---------------------------------------------------------------------------
# Partition-function coefficient identity


def z_trace_coefficient(two_j: int, M: int):
    """Coefficient of Tr exp(-beta H_j) in the continued Z(beta, -2M),
    as assembled from the l-sum: the level set at effective dimension
    2 - 2k (k = 2j + 1) carries weight m(-2M, M + 1 - k)."""
    k = two_j + 1
    return degeneracy_m(-2 * M, M + 1 - k)


def z_closed_coefficient(two_j: int, M: int):
    """(-1)^{2j-M} 2(2j+1)(2M+1)! / ((M-2j)! (M+2j+2)!)."""
    sign = 1 if (two_j - M) % 2 == 0 else -1
    return sign * mpq(2 * (two_j + 1) * factorial(2 * M + 1),
                      factorial(M - two_j) * factorial(M + two_j + 2))


def z_coefficient_identity(M: int) -> dict:
    """Check, exactly, for every 2j <= M:

    * the l-sum coefficient m(-2M, M - 2j) equals the closed form and
      (-1)^{2j-M} n(j, M);
    * the z(2 + 2k) pieces cancel: m(-2M, M+1+k) + m(-2M, M+1-k) = 0;
    * the k = 0 term m(-2M, M+1) vanishes and m(-2M, l) = 0 for l >= 2M+3.
    """
    report = {}
    for tj in range(M + 1):
        lhs = z_trace_coefficient(tj, M)
        sign = 1 if (tj - M) % 2 == 0 else -1
        report[("trace", tj)] = (lhs == z_closed_coefficient(tj, M)
                                 and lhs == sign * n_closed(tj, M))
    for k in range(1, M + 2):
        report[("cancel", k)] = degeneracy_m(-2 * M, M + 1 + k) + degeneracy_m(-2 * M, M + 1 - k) == 0
    report[("middle", 0)] = degeneracy_m(-2 * M, M + 1) == 0
    report[("tail", 0)] = all(degeneracy_m(-2 * M, l) == 0 for l in range(2 * M + 3, 2 * M + 12))
    return report
