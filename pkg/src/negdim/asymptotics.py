"""Singularity data (E0, g0, c) of the branch E(g, -2M), large-order
predictions for E^(k)(D) and for the root offsets nu + 2M, and convergence
reports comparing exact data with those predictions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
from gmpy2 import mpq

from .exact import (ONE, ZERO, DensePoly, PolyMatrix, Q, SparsePoly,
                    det_fraction_free, to_mpf)
from .roots import find_all_roots
from .series import algebraic_branch_series, partial_sum
from .spectral import PotentialSpec, spectral_poly_spin


class SingularityError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Resultant elimination


def sylvester(p: list, q: list):
    """Sylvester matrix of two polynomials given as coefficient lists
    (index = degree) whose entries are ring elements."""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    zero = p[0] * 0
    rows = []
    for i in range(n):
        row = [zero] * size
        for t, c in enumerate(reversed(p)):
            row[i + t] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for t, c in enumerate(reversed(q)):
            row[i + t] = c
        rows.append(row)
    return rows


def resultant_E(R: SparsePoly) -> DensePoly:
    """Res_E(R, dR/dE) as a polynomial in g."""
    ps = [c.to_dense() for c in R.coefficients_in("E")]
    qs = [c.to_dense() for c in R.diff("E").coefficients_in("E")]
    return det_fraction_free(PolyMatrix(sylvester(ps, qs)))


def poly_gcd(a: DensePoly, b: DensePoly) -> DensePoly:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a * (ONE / a.leading) if not a.is_zero() else a


def squarefree_part(p: DensePoly) -> DensePoly:
    g = poly_gcd(p, p.derivative())
    return p.exquo(g) if g.degree > 0 else p


# ---------------------------------------------------------------------------
# Singularity data


@dataclass
class SingularityData:
    M: int
    E0: object
    g0: object
    c: object
    provenance: str
    bits: int
    residual_R: object = None
    residual_RE: object = None
    candidates: list = field(default_factory=list)
    radius_estimate: object = None


def _numeric(R: SparsePoly):
    """Evaluators for R, R_E, R_g, R_EE, R_Eg at mpmath points."""
    parts = {
        "R": R, "RE": R.diff("E"), "Rg": R.diff("g"),
        "REE": R.diff("E").diff("E"), "REg": R.diff("E").diff("g"),
    }
    return {k: (lambda E, g, p=p: p.evaluate({"E": E, "g": g})) for k, p in parts.items()}


def _newton2(f, E, g, bits, steps=80):
    """Newton on (R, R_E) = 0 in the two unknowns (E, g)."""
    with mpmath.workprec(bits):
        tol = mpmath.ldexp(1, -bits + 10)
        for _ in range(steps):
            a = f["R"](E, g)
            b = f["RE"](E, g)
            # Jacobian [[R_E, R_g], [R_EE, R_Eg]]
            j11, j12 = f["RE"](E, g), f["Rg"](E, g)
            j21, j22 = f["REE"](E, g), f["REg"](E, g)
            det = j11 * j22 - j12 * j21
            if det == 0:
                break
            dE = (a * j22 - j12 * b) / det
            dg = (j11 * b - j21 * a) / det
            E -= dE
            g -= dg
            if abs(dE) + abs(dg) <= tol * (1 + abs(E) + abs(g)):
                break
        return E, g


def _snap_real(z, bits):
    """Drop an imaginary part that is pure rounding noise."""
    z = mpmath.mpc(z)
    if abs(z.imag) <= mpmath.ldexp(max(abs(z), 1), -bits // 2):
        return mpmath.mpf(z.real)
    return z


def radius_estimate(coeffs, k_lo: int = 40, k_hi: int = 60):
    """|e_k / e_{k+1}| (k/(k+1))^{3/2}, averaged over k in [k_lo, k_hi)."""
    vals = []
    for k in range(k_lo, min(k_hi, len(coeffs) - 1)):
        a, b = coeffs[k], coeffs[k + 1]
        if a == 0 or b == 0:
            continue
        r = abs(to_mpf(a) / to_mpf(b)) * (mpmath.mpf(k) / (k + 1)) ** mpmath.mpf(1.5)
        vals.append(r)
    if not vals:
        return None
    return mpmath.fsum(vals) / len(vals)


def singularity_data(M: int, potential: PotentialSpec | None = None, bits: int = 256,
                     K_branch: int = 120, radius_tol: float = 0.05) -> SingularityData:
    """Branch point of the ground-state root E(g, -2M).

    Candidates g0 are the roots of Res_E(R_M, dR_M/dE); each gets its double
    root E0 and a Newton polish.  The admissible one has |g0| matching the
    convergence radius of the exact branch series and the branch series
    evaluated just inside g0 lands on E0.
    """
    if M < 2:
        raise SingularityError("M >= 2 required; R_0 and R_1 do not depend on g")
    potential = potential or PotentialSpec.quartic()
    R = spectral_poly_spin(M, potential).poly
    res = squarefree_part(resultant_E(R))
    if res.degree < 1:
        raise SingularityError("no degenerate roots")
    rs = find_all_roots(res, bits=bits, stable_roots=(), classify=False)
    f = _numeric(R)
    series = algebraic_branch_series(M, K_branch, potential)
    with mpmath.workprec(bits):
        r_est = radius_estimate(series, K_branch // 2, K_branch)
        cands = []
        for root in rs.roots:
            g0 = mpmath.mpc(root.value)
            if mpmath.im(g0) == 0:
                g0 = mpmath.mpf(mpmath.re(g0))
            cs = [c.to_dense() for c in R.coefficients_in("E")]
            num = [_eval_mp(c, g0) for c in cs]
            Es = mpmath.polyroots(list(reversed(num)), maxsteps=200, extraprec=bits)
            E0 = min(Es, key=lambda e: abs(f["RE"](e, g0)))
            E0, g0 = _newton2(f, E0, g0, bits)
            E0, g0 = _snap_real(E0, bits), _snap_real(g0, bits)
            rg, ree = f["Rg"](E0, g0), f["REE"](E0, g0)
            c = 2 * g0 * rg / ree if ree != 0 else mpmath.inf
            cands.append({"g0": g0, "E0": E0, "c": c})
        admissible = [x for x in cands
                      if r_est is not None and abs(abs(x["g0"]) - r_est) <= radius_tol * r_est]
        if not admissible:
            raise SingularityError("no candidate matches the branch-series radius")
        for x in admissible:
            t = mpmath.mpf("0.98")
            s_val = partial_sum(series, t * x["g0"])
            local = mpmath.sqrt(x["c"] * (1 - t))
            x["score"] = min(abs(s_val - (x["E0"] - local)), abs(s_val - (x["E0"] + local)))
        def key(x):
            g = mpmath.mpc(x["g0"])
            return (x["score"], abs(g.imag) > 0, g.real < 0)
        best = min(admissible, key=key)
        return SingularityData(
            M, best["E0"], best["g0"], best["c"], "numeric", bits,
            abs(f["R"](best["E0"], best["g0"])), abs(f["RE"](best["E0"], best["g0"])),
            cands, r_est)


def _eval_mp(p: DensePoly, x):
    acc = mpmath.mpf(0)
    for c in reversed(p.coeffs):
        acc = acc * x + to_mpf(c)
    return acc


def closed_form_M2(bits: int = 256):
    with mpmath.workprec(bits):
        s3 = mpmath.sqrt(3)
        return {"E0": -2 / s3, "g0": 1 / s3 ** 3, "c": mpmath.mpf(8) / 9}


def closed_form_M3(bits: int = 256):
    with mpmath.workprec(bits):
        s13 = mpmath.sqrt(13)
        return {
            "g0": (5 * s13 - 1) / (36 * mpmath.sqrt(3 * (5 + 2 * s13))),
            "E0": -mpmath.sqrt((5 + 2 * s13) / 3),
            "c": mpmath.mpf(2) / 9 * (5 - 1 / s13),
        }


# ---------------------------------------------------------------------------
# Exact M = 2 data in Q(sqrt 3)


@dataclass(frozen=True)
class Surd:
    """a + b sqrt(d) with rational a, b."""

    a: object
    b: object
    d: int

    def _c(self, o):
        if isinstance(o, Surd):
            if o.d != self.d:
                raise ValueError("different radicands")
            return o
        return Surd(Q(o), ZERO, self.d)

    def __add__(self, o):
        o = self._c(o)
        return Surd(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.d)

    def __sub__(self, o):
        return self + (-self._c(o))

    def __rsub__(self, o):
        return self._c(o) - self

    def __mul__(self, o):
        o = self._c(o)
        return Surd(self.a * o.a + self.b * o.b * self.d, self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = Surd(ONE, ZERO, self.d)
        for _ in range(n):
            out = out * self
        return out

    def inverse(self):
        den = self.a * self.a - self.b * self.b * self.d
        return Surd(self.a / den, -self.b / den, self.d)

    def __truediv__(self, o):
        return self * self._c(o).inverse()

    def is_zero(self):
        return self.a == 0 and self.b == 0


def exact_surd_eval(p: SparsePoly, E: Surd, g: Surd) -> Surd:
    acc = Surd(ZERO, ZERO, E.d)
    for (de, dg), c in p.terms.items():
        acc = acc + (E ** de) * (g ** dg) * c
    return acc


def exact_M2_certificate() -> dict:
    """R~_2, dR~_2/dE vanish exactly at E0 = -2/sqrt3, g0 = 3^{-3/2}, and
    c = 2 g0 R_g / R_EE is exactly 8/9."""
    R = spectral_poly_spin(2, PotentialSpec.quartic()).poly
    E0 = Surd(ZERO, mpq(-2, 3), 3)
    g0 = Surd(ZERO, mpq(1, 9), 3)
    rv = exact_surd_eval(R, E0, g0)
    rev = exact_surd_eval(R.diff("E"), E0, g0)
    c = (g0 * 2 * exact_surd_eval(R.diff("g"), E0, g0)) / exact_surd_eval(R.diff("E").diff("E"), E0, g0)
    return {"R": rv.is_zero(), "RE": rev.is_zero(), "c": c}


def consistency_identity_M2() -> dict:
    """(1/2) sqrt(c/pi) = (1/3) sqrt(2/pi) and g0^{-k} = 3^{3k/2}, compared
    through exact squares (both sides are positive)."""
    c = exact_M2_certificate()["c"]
    if c.b != 0:
        return {"prefactor": False, "growth": False}
    lhs_sq_times_pi = c.a / 4            # ((1/2) sqrt(c/pi))^2 * pi
    rhs_sq_times_pi = mpq(2, 9)          # ((1/3) sqrt(2/pi))^2 * pi
    g0 = Surd(ZERO, mpq(1, 9), 3)
    g0_sq = g0 * g0                      # g0^{-2k} = 3^{3k}  <=>  g0^2 = 1/27
    return {"prefactor": lhs_sq_times_pi == rhs_sq_times_pi,
            "growth": g0_sq.b == 0 and g0_sq.a == mpq(1, 27)}


# ---------------------------------------------------------------------------
# Asymptotic models


@dataclass
class AsymptoticModel:
    kind: str                      # general-D | general-N | special-D | nu-offset
    params: dict = field(default_factory=dict)

    def __call__(self, D, k):
        return predict_series_coeff(D, k, self)


def _mp(x):
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return x
    try:
        return to_mpf(Q(x))
    except TypeError:
        return mpmath.mpf(x)


def general_D(D, k: int, correction: bool = True):
    """(-1)^{k+1} Gamma(k + D/2) 3^{k + D/2} 2^{D/2} / (pi Gamma(D/2)) [1 - ...].

    Gamma(k + D/2)/Gamma(D/2) is the rising factorial (D/2)_k, which is exactly
    zero at D = -2M for k > M and finite everywhere.
    """
    D = _mp(D)
    h = D / 2
    sign = 1 if (k + 1) % 2 == 0 else -1
    val = sign * mpmath.rf(h, k) * mpmath.power(3, k + h) * mpmath.power(2, h) / mpmath.pi
    if correction:
        val *= 1 - (mpmath.mpf(5) / 3 + mpmath.mpf(9) / 2 * D + mpmath.mpf(7) / 4 * D * D) / (6 * k)
    return val


def general_N(D, k: int, N: int):
    """Large-order formula for V = r^2/2 + g r^{2N}."""
    D = _mp(D)
    h = D / 2
    a = mpmath.gamma(mpmath.mpf(2 * N) / (N - 1)) / mpmath.gamma(mpmath.mpf(N) / (N - 1)) ** 2
    val = mpmath.factorial(k * (N - 1))
    val *= -(1 / mpmath.pi) * mpmath.power(N - 1, h) * mpmath.rgamma(h)
    val *= mpmath.power(a, h) * mpmath.power(k, h - 1)
    val *= mpmath.power(mpmath.power(-a / 2, N - 1), k)
    return val


def special_D(k: int, c, g0):
    """(1/2) sqrt(c/pi) k^{-3/2} g0^{-k}."""
    return mpmath.sqrt(_mp(c) / mpmath.pi) / 2 * mpmath.power(k, mpmath.mpf(-1.5)) * mpmath.power(_mp(g0), -k)


def special_D_M2_closed(k: int):
    """(1/3) sqrt(2/pi) k^{-3/2} 3^{3k/2}."""
    return mpmath.sqrt(2 / mpmath.pi) / 3 * mpmath.power(k, mpmath.mpf(-1.5)) * mpmath.power(3, mpmath.mpf(3 * k) / 2)


def predict_series_coeff(D, k: int, model: AsymptoticModel):
    p = model.params
    if model.kind == "general-D":
        return general_D(D, k, p.get("correction", True))
    if model.kind == "general-N":
        return general_N(D, k, p["N"])
    if model.kind == "special-D":
        return special_D(k, p["c"], p["g0"])
    if model.kind == "nu-offset":
        return predict_root_offset(p["M"], k, p.get("singularity"))
    raise ValueError(f"unknown model kind {model.kind!r}")


def predict_root_offset(M: int, k: int, sing: SingularityData | dict | None = None):
    """(-6)^M / M! sqrt(pi c) (-1)^k / k! k^{M-1/2} (3 g0)^{-k}."""
    if sing is None:
        sing = {2: closed_form_M2, 3: closed_form_M3}.get(M)
        if sing is None:
            sing = singularity_data(M)
        else:
            sing = sing(mpmath.mp.prec + 32)
    if isinstance(sing, SingularityData):
        c, g0 = sing.c, sing.g0
    else:
        c, g0 = sing["c"], sing["g0"]
    sign = 1 if k % 2 == 0 else -1
    val = mpmath.power(-6, M) / mpmath.factorial(M) * mpmath.sqrt(mpmath.pi * c)
    val *= sign / mpmath.factorial(k) * mpmath.power(k, M - mpmath.mpf(0.5))
    val *= mpmath.power(3 * g0, -k)
    return val


def predict_root_offset_M2_closed(k: int):
    """12 sqrt(2 pi) (-1)^k / k! k^{3/2} 3^{k/2}."""
    sign = 1 if k % 2 == 0 else -1
    return 12 * mpmath.sqrt(2 * mpmath.pi) * sign / mpmath.factorial(k) \
        * mpmath.power(k, mpmath.mpf(1.5)) * mpmath.power(3, mpmath.mpf(k) / 2)


# ---------------------------------------------------------------------------
# Root-distribution asymptotes


def digamma_asymptote(D, k: int):
    """(1/2) [ln(6k) - psi(D/2 + 2)]."""
    D = _mp(D)
    return (mpmath.log(6 * k) - mpmath.digamma(D / 2 + 2)) / 2


def root_product_asymptote(k: int):
    """(-1)^{k+1} 3 k^2 (k / (e sqrt3))^k."""
    sign = 1 if (k + 1) % 2 == 0 else -1
    return sign * 3 * k ** 2 * mpmath.power(k / (mpmath.e * mpmath.sqrt(3)), k)


def root_product_gamma_form(k: int):
    """(1/beta_k) 3^k Gamma(k) / (4 pi)."""
    from .series import beta_k
    return mpmath.power(3, k) * mpmath.gamma(k) / (4 * mpmath.pi) / to_mpf(beta_k(k))


def geometric_mean_asymptote(k: int):
    """k/(e sqrt3) (6 k^2)^{1/k}."""
    return k / (mpmath.e * mpmath.sqrt(3)) * mpmath.power(6 * k * k, mpmath.mpf(1) / k)


# ---------------------------------------------------------------------------
# Convergence reports


def convergence_report(ks, exact_values, predict, bits: int | None = None) -> list:
    """Rows (k, exact, predicted, ratio, bits) plus a monotonicity flag: the
    distance |ratio - 1| does not increase from one row to the next."""
    rows = []
    prev = None
    b = bits or mpmath.mp.prec
    with mpmath.workprec(b):
        for k, ex in zip(ks, exact_values):
            exv = ex if isinstance(ex, (mpmath.mpf, mpmath.mpc)) else _mp(ex)
            pr = predict(k)
            ratio = exv / pr if pr != 0 else mpmath.inf
            dist = abs(ratio - 1)
            mono = prev is None or dist <= prev
            rows.append({"k": k, "exact": exv, "predicted": pr, "ratio": ratio,
                         "bits": b, "monotone": mono})
            prev = dist
    return rows
