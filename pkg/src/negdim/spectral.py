"""Potentials and the spectral polynomials R_{2j}(E) built three ways:
spin determinant, C-matrix determinant and the power-series recursion.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import lru_cache

from gmpy2 import mpq

from .exact import (ONE, ZERO, DensePoly, PolyMatrix, Q, SparsePoly,
                    det_fraction_free, format_rational)
from .spin import make_spin_matrices, SpinLabel, matmul

PROVENANCES = ("spin-det", "c-matrix", "recursion")


class PotentialError(ValueError):
    pass


class PotentialSpec:
    """Coefficients w_k of V(2 zeta) = sum_k w_k zeta^k.

    Each w_k is a polynomial in the parameter variables ``params`` (``("g",)``
    for the builtin couplings, ``("w1", ..., "wL")`` for the generic case).
    """

    def __init__(self, w: dict, params=("g",), name: str = "custom"):
        self.params = tuple(params)
        clean = {}
        for k, v in w.items():
            k = int(k)
            if not isinstance(v, SparsePoly):
                v = SparsePoly.const(v, self.params)
            if v.vars != self.params:
                raise PotentialError(f"w_{k} has variables {v.vars}, expected {self.params}")
            if not v:
                continue
            if k <= 0:
                raise PotentialError("w_k must vanish for k <= 0 (V(0) = 0)")
            clean[k] = v
        self.w = dict(sorted(clean.items()))
        self.name = name

    # -- constructors
    @classmethod
    def quartic(cls):
        g = SparsePoly.gen("g", ("g",))
        return cls({1: 1, 2: 4 * g}, name="quartic")

    @classmethod
    def sextic(cls):
        g = SparsePoly.gen("g", ("g",))
        return cls({1: 1, 3: 8 * g}, name="sextic")

    @classmethod
    def harmonic(cls):
        return cls({1: 1}, name="harmonic")

    @classmethod
    def monomial(cls, N: int):
        """V = r^2/2 + g r^{2N}, so w_N = 2^N g."""
        if N < 2:
            raise PotentialError("perturbation degree N must be >= 2")
        g = SparsePoly.gen("g", ("g",))
        return cls({1: 1, N: (2 ** N) * g}, name=f"monomial{N}")

    @classmethod
    def generic(cls, L: int):
        names = tuple(f"w{k}" for k in range(1, max(L, 1) + 1))
        return cls({k: SparsePoly.gen(f"w{k}", names) for k in range(1, len(names) + 1)},
                   params=names, name=f"generic{L}")

    @classmethod
    def random(cls, seed: int = 0, degree: int = 4):
        """w_1 = 1, w_k = a_k + b_k g for 2 <= k <= degree with small rationals."""
        rng = random.Random(seed)
        g = SparsePoly.gen("g", ("g",))
        w = {1: SparsePoly.const(1, ("g",))}
        for k in range(2, degree + 1):
            a = mpq(rng.randint(-9, 9), rng.randint(1, 5))
            b = mpq(rng.randint(1, 9), rng.randint(1, 5))
            w[k] = a + b * g
        return cls(w, name=f"random{seed}")

    @classmethod
    def from_json(cls, obj):
        """``{"name": ..., "w": {"1": "1", "2": ["0", "4"]}}``; a list is the
        coefficient list of w_k in g (ascending), a string a constant."""
        if isinstance(obj, str):
            with open(obj) as fh:
                obj = json.load(fh)
        if not isinstance(obj, dict) or "w" not in obj or not isinstance(obj["w"], dict):
            raise PotentialError("potential JSON needs a 'w' object")
        w = {}
        for k, v in obj["w"].items():
            try:
                kk = int(k)
            except ValueError:
                raise PotentialError(f"bad key {k!r}") from None
            try:
                if isinstance(v, list):
                    w[kk] = DensePoly(v, "g").to_sparse()
                else:
                    w[kk] = Q(v if isinstance(v, str) else int(v))
            except (TypeError, ValueError) as exc:
                raise PotentialError(f"bad coefficient for w_{k}: {exc}") from None
        return cls(w, name=obj.get("name", "custom"))

    @classmethod
    def builtin(cls, name: str):
        table = {"quartic": cls.quartic, "sextic": cls.sextic, "harmonic": cls.harmonic}
        if name in table:
            return table[name]()
        if name.startswith("random"):
            return cls.random(int(name[6:] or 0))
        raise PotentialError(f"unknown potential {name!r}")

    def to_json(self) -> dict:
        if self.params != ("g",):
            raise PotentialError("only g-parametrized potentials serialize")
        return {"name": self.name,
                "w": {str(k): [format_rational(c) for c in v.to_dense().coeffs]
                      for k, v in self.w.items()}}

    # -- views
    @property
    def L(self) -> int:
        return max(self.w) if self.w else 0

    def w_poly(self, k: int) -> SparsePoly:
        return self.w.get(k, SparsePoly(self.params, {}))

    def w_poly_g(self, k: int) -> DensePoly:
        if self.params != ("g",):
            raise PotentialError("potential is not parametrized by g alone")
        return self.w_poly(k).to_dense()

    def items_g(self):
        return [(k, self.w_poly_g(k)) for k in self.w]

    def perturbation(self) -> dict:
        """u_m with V(2 zeta) = zeta + g * sum_m u_m zeta^m; rejects other forms."""
        if self.params != ("g",):
            raise PotentialError("series need a g-parametrized potential")
        if self.w_poly_g(1) != DensePoly([1], "g"):
            raise PotentialError("leading part must be harmonic (w_1 = 1)")
        u = {}
        for k, wk in self.items_g():
            if k == 1:
                continue
            if wk.degree != 1 or wk.coeffs[0] != 0:
                raise PotentialError(f"w_{k} must be proportional to g")
            u[k] = wk.coeffs[1]
        return u

    def __repr__(self):
        return f"PotentialSpec({self.name}, w={ {k: str(v) for k, v in self.w.items()} })"


@dataclass(frozen=True)
class SpectralPolynomial:
    """R_{2j} with provenance.

    ``raw`` is what the construction produced (a determinant, or s_{2j+1}
    for the recursion); ``normalization`` maps it to the stored ``poly``,
    which is R~ = (-2)^{-2j} det[J+ + V(2J-) - E].
    """

    two_j: int
    poly: SparsePoly
    raw: SparsePoly
    normalization: object
    provenance: str
    det_over_raw: object = field(default=None)

    @property
    def det(self) -> SparsePoly:
        """det[J+ + V(2J-) - E] itself."""
        return self.poly * (mpq(-2) ** self.two_j)

    def monic(self) -> SparsePoly:
        return monic_in_E(self.poly)

    def at_g(self, g):
        return self.poly.specialize("g", g)


def monic_in_E(p: SparsePoly) -> SparsePoly:
    lead = p.leading_coefficient("E")
    if not lead.is_constant():
        raise ValueError("leading E-coefficient is not constant")
    return p * (ONE / lead.constant_term())


def tilde_factor(two_j: int):
    return mpq(-2) ** (-two_j)


def _vars(potential: PotentialSpec):
    return ("E",) + potential.params


def _lift(potential: PotentialSpec, k: int) -> SparsePoly:
    return potential.w_poly(k).promote(_vars(potential))


def _finish(two_j, raw, det_over_raw, provenance):
    norm = tilde_factor(two_j) * det_over_raw
    return SpectralPolynomial(two_j, raw * norm, raw, norm, provenance, det_over_raw)


def spectral_poly_spin(j, potential: PotentialSpec) -> SpectralPolynomial:
    """det[J+ + V(2 J-) - E] over the monomial spin-j basis."""
    two_j = j.two_j if isinstance(j, SpinLabel) else int(j)
    return _spin_cached(two_j, potential)


_cache: dict = {}


def _spin_cached(two_j: int, potential: PotentialSpec) -> SpectralPolynomial:
    key = ("spin", two_j, id(potential))
    hit = _cache.get(key)
    if hit is not None and hit[0] is potential:
        return hit[1]
    vs = _vars(potential)
    sm = make_spin_matrices(two_j, "monomial")
    jp, jm, _ = sm.as_lists()
    n = two_j + 1
    E = SparsePoly.gen("E", vs)
    zero = SparsePoly(vs, {})
    mat = [[SparsePoly.const(jp[i][c], vs) if jp[i][c] else zero for c in range(n)] for i in range(n)]
    power = jm
    k = 1
    while k <= two_j:
        wk = _lift(potential, k)
        if wk:
            for i in range(n):
                for c in range(n):
                    if power[i][c]:
                        mat[i][c] = mat[i][c] + wk * power[i][c]
        power = matmul(power, jm)
        k += 1
    for i in range(n):
        mat[i][i] = mat[i][i] - E
    det = det_fraction_free(PolyMatrix(mat))
    sp = _finish(two_j, det, ONE, "spin-det")
    _cache[key] = (potential, sp)
    return sp


def cmatrix(two_j: int, potential: PotentialSpec, E_symbol: bool = True):
    """C^{(2j)}_{kn} = u_{k-n} - a_k delta_{k,n-1}, a_k = k(k - 1 - 2j), 1-based."""
    vs = _vars(potential)
    n = two_j + 1
    E = SparsePoly.gen("E", vs)
    zero = SparsePoly(vs, {})

    def u(m):
        if m == 0:
            return -E
        if m < 0:
            return zero
        return _lift(potential, m)

    rows = []
    for k in range(1, n + 1):
        row = []
        for c in range(1, n + 1):
            entry = u(k - c)
            if k == c - 1:
                entry = entry - k * (k - 1 - two_j)
            row.append(entry)
        rows.append(row)
    return PolyMatrix(rows)


def spectral_poly_cmatrix(j, potential: PotentialSpec) -> SpectralPolynomial:
    two_j = j.two_j if isinstance(j, SpinLabel) else int(j)
    det = det_fraction_free(cmatrix(two_j, potential))
    return _finish(two_j, det, ONE, "c-matrix")


def recursion_s(two_j: int, potential: PotentialSpec) -> SparsePoly:
    """s_{2j+1}({u_m}, -4j) by iterating a_{k+1} p_{k+1} = sum_m u_m p_{k-m}."""
    vs = _vars(potential)
    E = SparsePoly.gen("E", vs)
    u = {0: -E}
    for k in potential.w:
        u[k] = _lift(potential, k)
    p = [SparsePoly.const(1, vs)]
    for k in range(two_j + 1):
        acc = SparsePoly(vs, {})
        for m, um in u.items():
            if m <= k:
                acc = acc + um * p[k - m]
        if k == two_j:
            return acc
        a = (k + 1) * (k - two_j)
        p.append(acc * mpq(1, a))
    raise AssertionError("unreachable")


def spectral_poly_recursion(j, potential: PotentialSpec) -> SpectralPolynomial:
    """Recursion construction; the constant det/s is measured from the
    leading E coefficient, since det has leading term (-E)^{2j+1}."""
    two_j = j.two_j if isinstance(j, SpinLabel) else int(j)
    s = recursion_s(two_j, potential)
    lead = s.leading_coefficient("E")
    if not lead.is_constant():
        raise ValueError("s_{2j+1} leading coefficient is not constant")
    measured = mpq(-1) ** (two_j + 1) / lead.constant_term()
    return _finish(two_j, s, measured, "recursion")


def det_over_s_product(two_j: int):
    """prod_{k=1}^{2j} a_k(-4j), the product that relates det C to s."""
    out = ONE
    for k in range(1, two_j + 1):
        out *= k * (k - 1 - two_j)
    return out


def harmonic_tilde(two_j: int) -> SparsePoly:
    """-2 prod_{k=0}^{2j} ((E - 2j)/2 + k) in variables (E, g)."""
    vs = ("E", "g")
    E = SparsePoly.gen("E", vs)
    out = SparsePoly.const(-2, vs)
    for k in range(two_j + 1):
        out = out * (E * mpq(1, 2) + mpq(-two_j, 2) + k)
    return out


def harmonic_det(two_j: int) -> SparsePoly:
    """2^{2j+1} prod_{n=-j}^{j} (n - E/2) for the harmonic potential."""
    vs = ("E", "g")
    E = SparsePoly.gen("E", vs)
    out = SparsePoly.const(2 ** (two_j + 1), vs)
    for t in range(-two_j, two_j + 1, 2):
        out = out * (mpq(t, 2) - E * mpq(1, 2))
    return out


def quartic_prime_parts(two_j: int) -> SparsePoly:
    """R~_{2j}(E, g) - R~_{2j}(E, 0) for the quartic."""
    if two_j > 7:
        raise ValueError("quartic prime parts are tabulated for 2j <= 7")
    r = spectral_poly_spin(two_j, _QUARTIC).poly
    r0 = r.specialize("g", 0).promote(("E", "g"))
    return r - r0


def large_E_coefficients(j, potential: PotentialSpec, provenance: str = "spin-det"):
    """Top four E-coefficients of (-1)^{2j+1} R_{2j}, as polynomials in the
    potential parameters: (c_{2j+1}, c_{2j}, c_{2j-1}, c_{2j-2})."""
    two_j = j.two_j if isinstance(j, SpinLabel) else int(j)
    build = {"spin-det": spectral_poly_spin, "c-matrix": spectral_poly_cmatrix,
             "recursion": spectral_poly_recursion}[provenance]
    det = build(two_j, potential).det * (mpq(-1) ** (two_j + 1))
    cs = det.coefficients_in("E")
    top = two_j + 1
    zero = SparsePoly(potential.params, {})
    return tuple(cs[top - i] if top - i >= 0 else zero for i in range(4))


def large_E_formula(j, potential: PotentialSpec):
    """1, 0, -(2/3) j(j+1)(2j+1) w1, -(2/15) j(j+1)(2j+1)(2j-1)(2j+3) w2."""
    two_j = j.two_j if isinstance(j, SpinLabel) else int(j)
    jj = mpq(two_j, 2)
    one = SparsePoly.const(1, potential.params)
    zero = SparsePoly(potential.params, {})
    c1 = -mpq(2, 3) * jj * (jj + 1) * (2 * jj + 1)
    c2 = -mpq(2, 15) * jj * (jj + 1) * (2 * jj + 1) * (2 * jj - 1) * (2 * jj + 3)
    return (one, zero, potential.w_poly(1) * c1, potential.w_poly(2) * c2)


def build(two_j: int, potential: PotentialSpec, provenance: str = "spin-det") -> SpectralPolynomial:
    if provenance == "spin-det":
        return spectral_poly_spin(two_j, potential)
    if provenance == "c-matrix":
        return spectral_poly_cmatrix(two_j, potential)
    if provenance == "recursion":
        return spectral_poly_recursion(two_j, potential)
    raise ValueError(f"unknown provenance {provenance!r}")


_QUARTIC = PotentialSpec.quartic()


def quartic_tilde(two_j: int) -> SparsePoly:
    """R~_{2j}(E, g) for the quartic potential."""
    return spectral_poly_spin(two_j, _QUARTIC).poly
