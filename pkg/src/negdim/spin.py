"""sl(2) spin-j matrices, trace words, and the tensor-product Hamiltonian on
M spin-1/2 sites.

Monomial basis (the zeta^k basis of the differential realization
T+ = -zeta d^2 + 2j d, T0 = -zeta d + j, T- = zeta) has rational entries:

    J0[k][k]    = j - k
    J+[k-1][k]  = k (2j - k + 1)
    J-[k+1][k]  = 1

The standard (Hermitian-normalized) basis has the square roots of the
products k (2j - k + 1) on both off-diagonals; those entries are carried
exactly as ``Radical`` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpq

from .exact import (ONE, ZERO, DensePoly, SparsePoly, Q, charpoly_hessenberg,
                    interpolate)

DEFAULT_TENSOR_CAP = 10


# ---------------------------------------------------------------------------
# Exact radicals for the standard basis


def _squarefree_split(n: int):
    """n = s^2 * r with r squarefree; returns (s, r)."""
    s, r = 1, 1
    d = 2
    while d * d <= n:
        while n % (d * d) == 0:
            n //= d * d
            s *= d
        if n % d == 0:
            n //= d
            r *= d
        d += 1
    return s, r * n


@dataclass(frozen=True)
class Radical:
    """coef * sqrt(radicand) with squarefree integer radicand >= 1."""

    coef: object
    radicand: int = 1

    @staticmethod
    def sqrt(q) -> "Radical":
        q = Q(q)
        if q < 0:
            raise ValueError("square root of a negative rational")
        if q == 0:
            return Radical(ZERO, 1)
        num = int(q.numerator) * int(q.denominator)
        s, r = _squarefree_split(num)
        return Radical(mpq(s, int(q.denominator)), r)

    def _norm(self):
        return Radical(self.coef, 1) if self.coef == 0 else self

    def __add__(self, other):
        other = _as_radical(other)
        if self.coef == 0:
            return other
        if other.coef == 0:
            return self
        if other.radicand != self.radicand:
            raise ValueError("sum of unlike radicals is not representable")
        return Radical(self.coef + other.coef, self.radicand)._norm()

    __radd__ = __add__

    def __neg__(self):
        return Radical(-self.coef, self.radicand)

    def __sub__(self, other):
        return self + (-_as_radical(other))

    def __rsub__(self, other):
        return _as_radical(other) - self

    def __mul__(self, other):
        other = _as_radical(other)
        if self.coef == 0 or other.coef == 0:
            return Radical(ZERO, 1)
        g = math.gcd(self.radicand, other.radicand)
        r = (self.radicand // g) * (other.radicand // g)
        return Radical(self.coef * other.coef * g, r)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            o = _as_radical(other)
        except TypeError:
            return NotImplemented
        if self.coef == 0 and o.coef == 0:
            return True
        return self.coef == o.coef and self.radicand == o.radicand

    def __hash__(self):
        return hash((self.coef, self.radicand))

    def is_rational(self) -> bool:
        return self.radicand == 1 or self.coef == 0

    def rational(self):
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return Q(self.coef)

    def __repr__(self):
        if self.radicand == 1:
            return f"{self.coef}"
        return f"{self.coef}*sqrt({self.radicand})"


def _as_radical(x) -> Radical:
    if isinstance(x, Radical):
        return x
    if isinstance(x, (int, Fraction)) or type(x) is type(ZERO):
        return Radical(Q(x), 1)
    raise TypeError(f"not a radical: {x!r}")


# ---------------------------------------------------------------------------
# Plain dense matrix helpers (lists of lists)


def zeros(n: int, m: int | None = None, zero=ZERO):
    m = n if m is None else m
    return [[zero] * m for _ in range(n)]


def identity(n: int, one=ONE, zero=ZERO):
    out = zeros(n, zero=zero)
    for i in range(n):
        out[i][i] = one
    return out


def matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    zero = a[0][0] * 0 if n else ZERO
    out = [[zero] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            x = ai[t]
            if x == 0:
                continue
            bt = b[t]
            for j in range(m):
                if bt[j] != 0:
                    oi[j] = oi[j] + x * bt[j]
    return out


def matadd(a, b, scale_b=1):
    return [[x + scale_b * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def trace(a):
    acc = a[0][0] * 0
    for i in range(len(a)):
        acc = acc + a[i][i]
    return acc


def commutator(a, b):
    return matadd(matmul(a, b), matmul(b, a), -1)


def kron(a, b):
    out = []
    for ra in a:
        for rb in b:
            out.append([x * y for x in ra for y in rb])
    return out


# ---------------------------------------------------------------------------
# Spin matrices


class SpinLabel:
    """Spin j = two_j / 2."""

    __slots__ = ("two_j",)

    def __init__(self, two_j: int):
        if int(two_j) != two_j or two_j < 0:
            raise ValueError(f"two_j must be a nonnegative integer, got {two_j}")
        self.two_j = int(two_j)

    @property
    def j(self):
        return mpq(self.two_j, 2)

    @property
    def dim(self) -> int:
        return self.two_j + 1

    def __repr__(self):
        return f"SpinLabel(two_j={self.two_j})"

    def __eq__(self, other):
        return isinstance(other, SpinLabel) and other.two_j == self.two_j

    def __hash__(self):
        return hash(self.two_j)


def _label(j) -> SpinLabel:
    return j if isinstance(j, SpinLabel) else SpinLabel(j)


@dataclass(frozen=True)
class SpinMatrices:
    label: SpinLabel
    basis: str
    Jplus: tuple
    Jminus: tuple
    J0: tuple

    def as_lists(self):
        return ([list(r) for r in self.Jplus], [list(r) for r in self.Jminus],
                [list(r) for r in self.J0])


@lru_cache(maxsize=None)
def _spin_cached(two_j: int, basis: str) -> SpinMatrices:
    n = two_j + 1
    jj = mpq(two_j, 2)
    if basis == "monomial":
        jp, jm, j0 = zeros(n), zeros(n), zeros(n)
        for k in range(n):
            j0[k][k] = jj - k
            if k >= 1:
                jp[k - 1][k] = mpq(k * (two_j - k + 1))
            if k + 1 < n:
                jm[k + 1][k] = ONE
    elif basis == "standard":
        z = Radical(ZERO, 1)
        jp, jm, j0 = zeros(n, zero=z), zeros(n, zero=z), zeros(n, zero=z)
        for k in range(n):
            j0[k][k] = Radical(jj - k, 1)
            if k >= 1:
                r = Radical.sqrt(k * (two_j - k + 1))
                jp[k - 1][k] = r
                jm[k][k - 1] = r
    else:
        raise ValueError(f"unknown basis {basis!r} (use 'monomial' or 'standard')")
    t = lambda m: tuple(tuple(r) for r in m)
    return SpinMatrices(SpinLabel(two_j), basis, t(jp), t(jm), t(j0))


def make_spin_matrices(j, basis: str = "monomial") -> SpinMatrices:
    """Spin-j matrices; ``j`` is a SpinLabel or the integer 2j."""
    return _spin_cached(_label(j).two_j, basis)


def check_sl2(sm: SpinMatrices) -> dict:
    """Exact sl(2) relations and the Casimir value for a set of spin matrices."""
    jp, jm, j0 = sm.as_lists()
    n = len(j0)
    jj = sm.label.j
    zero = j0[0][0] * 0
    neg = lambda m: [[-x for x in r] for r in m]
    two = lambda m: [[x + x for x in r] for r in m]

    def same(a, b):
        return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))

    cas = matadd(matmul(jp, jm), matmul(jm, jp))
    cas = [[x * mpq(1, 2) for x in r] for r in cas]
    cas = matadd(cas, matmul(j0, j0))
    target = [[(jj * (jj + 1) if i == k else zero) for k in range(n)] for i in range(n)]
    return {
        "[J0,J+]=J+": same(commutator(j0, jp), jp),
        "[J0,J-]=-J-": same(commutator(j0, jm), neg(jm)),
        "[J+,J-]=2J0": same(commutator(jp, jm), two(j0)),
        "casimir": same(cas, target),
    }


def trace_word(j, word) -> object:
    """Exact trace of a product of J+ / J- matrices.

    ``word`` is a sequence of "plus"/"minus" (or "+"/"-"), multiplied left to
    right.  Computed in the monomial basis; traces are basis independent.
    """
    sm = make_spin_matrices(j, "monomial")
    jp, jm, _ = sm.as_lists()
    n = len(jp)
    acc = identity(n)
    for w in word:
        if w in ("plus", "+", "p"):
            acc = matmul(acc, jp)
        elif w in ("minus", "-", "m"):
            acc = matmul(acc, jm)
        else:
            raise ValueError(f"unknown letter {w!r}")
    return trace(acc)


def trace_JpJm(j):
    """(2/3) j (j+1) (2j+1)."""
    jj = _label(j).j
    return mpq(2, 3) * jj * (jj + 1) * (2 * jj + 1)


def trace_Jp2Jm2(j):
    """(2/15) j (j+1) (2j+1) (2j-1) (2j+3)."""
    jj = _label(j).j
    return mpq(2, 15) * jj * (jj + 1) * (2 * jj + 1) * (2 * jj - 1) * (2 * jj + 3)


# ---------------------------------------------------------------------------
# Tensor-product Hamiltonian on M spin-1/2 sites


class TensorHamiltonian:
    """H = T+ + sum_k w_k T-^k on (C^2)^{otimes M}, dense.

    ``matrix`` entries are DensePoly in g.  T+ and T- are sums of site-local
    spin-1/2 generators.
    """

    def __init__(self, M: int, potential, cap: int = DEFAULT_TENSOR_CAP):
        if M < 1:
            raise ValueError("M must be positive")
        if M > cap:
            raise MemoryError(f"M={M} exceeds the tensor-product cap {cap}")
        self.M = M
        self.potential = potential
        dim = 2 ** M
        self.dim = dim
        tp = _site_sum(M, [[ZERO, ONE], [ZERO, ZERO]])
        tm = _site_sum(M, [[ZERO, ZERO], [ONE, ZERO]])
        gzero = DensePoly([], "g")
        mat = [[DensePoly([x], "g") for x in row] for row in tp]
        power = tm
        k = 1
        while any(x for r in power for x in r):
            wk = potential.w_poly_g(k)
            if wk:
                for i in range(dim):
                    for c in range(dim):
                        if power[i][c]:
                            mat[i][c] = mat[i][c] + wk * power[i][c]
            power = matmul(power, tm)
            k += 1
        self.matrix = tuple(tuple(r) for r in mat)
        self._zero = gzero

    def at(self, g):
        """Rational matrix at a numeric coupling value."""
        g = Q(g)
        return [[p(g) for p in row] for row in self.matrix]

    def g_degree_bound(self) -> int:
        """Upper bound on deg_g det(H - E) from the T-/T+ grading.

        A term w_k T-^k raises the grade by k, T+ lowers it by one, so a
        nonvanishing permutation product uses at most n/(k+1) factors of w_k.
        """
        best = mpq(0)
        for k, wk in self.potential.items_g():
            if wk.degree > 0:
                best = max(best, mpq(wk.degree, k + 1))
        return int(best * self.dim)

    def characteristic_polynomial(self) -> SparsePoly:
        """det(H - E*Id) as an exact polynomial in (E, g).

        Evaluation at deg+1 rational couplings (Hessenberg reduction there),
        then exact interpolation in g.
        """
        deg = self.g_degree_bound()
        xs = [mpq(i + 1, 7) for i in range(deg + 1)]
        cps = [charpoly_hessenberg(self.at(x)) for x in xs]
        sign = -1 if self.dim % 2 else 1
        terms = {}
        for e in range(self.dim + 1):
            ys = [cp.coeffs[e] if e < len(cp.coeffs) else ZERO for cp in cps]
            pe = interpolate(xs, ys, "g")
            for dg, c in enumerate(pe.coeffs):
                if c:
                    terms[(e, dg)] = sign * c
        return SparsePoly(("E", "g"), terms)


def _site_sum(M: int, local):
    dim = 2 ** M
    out = zeros(dim)
    eye = identity(2)
    for site in range(M):
        op = [[ONE]]
        for s in range(M):
            op = kron(op, local if s == site else eye)
        out = matadd(out, op)
    return out


def build_tensor_hamiltonian(M: int, potential, cap: int = DEFAULT_TENSOR_CAP) -> TensorHamiltonian:
    return TensorHamiltonian(M, potential, cap)


def tensor_factorization(M: int, potential, cap: int = DEFAULT_TENSOR_CAP):
    """Factor det(H_F - E) over the tensor space into spectral polynomials.

    Returns (const, {two_j: multiplicity}, ok) where multiplicities come from
    repeated exact division and ok says the quotient left is the constant.
    """
    from .spectral import spectral_poly_spin

    cp = build_tensor_hamiltonian(M, potential, cap).characteristic_polynomial()
    rest = cp
    mult = {}
    for two_j in range(M, -1, -2):
        r = spectral_poly_spin(two_j, potential).poly
        count = 0
        while rest.degree("E") >= r.degree("E"):
            try:
                rest = rest.exquo(r)
            except ArithmeticError:
                break
            count += 1
        mult[two_j] = count
    ok = rest.is_constant()
    const = rest.constant_term() if ok else None
    return const, mult, ok
