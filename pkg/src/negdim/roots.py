"""Arbitrary-precision complex roots of exact polynomials (Aberth iteration),
residual certificates, cluster labelling near negative even integers, and
root statistics.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import mpmath
import numpy as np
from gmpy2 import mpq

from .exact import ONE, ZERO, DensePoly, Q, to_mpf

BITS_LADDER = (128, 256, 512, 1024, 2048, 4096, 8192)
DEFAULT_WINDOW = 1.0


class RootNonConvergence(RuntimeError):
    """Precision ladder exhausted without a certified root set."""


def max_bits() -> int:
    env = os.environ.get("NEGDIM_MAX_BITS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"NEGDIM_MAX_BITS must be an integer, got {env!r}") from None
    return BITS_LADDER[-1]


def ladder(start: int | None = None):
    cap = max_bits()
    out = [b for b in BITS_LADDER if b <= cap and (start is None or b >= start)]
    if start is not None and start not in out and start <= cap:
        out.insert(0, start)
    if not out:
        raise RootNonConvergence(f"precision cap {cap} below the ladder start")
    return out


@dataclass
class Root:
    value: object                 # mpc (or mpf for exactly real roots)
    residual: object              # |p(value)| at working precision
    bound: object                 # certificate bound the residual must meet
    newton: object                # |p/p'| at value, a first-order error estimate
    label: str = "bulk"
    offset: object = None         # value + 2M, refined, for cluster roots
    exact: bool = False

    @property
    def is_real(self) -> bool:
        return mpmath.im(self.value) == 0


@dataclass
class RootSet:
    poly: DensePoly
    bits: int
    roots: list
    stable: list = field(default_factory=list)
    k: int | None = None
    iterations: int = 0

    @property
    def degree(self) -> int:
        return self.poly.degree

    def values(self):
        return [r.value for r in self.roots]

    def cluster(self, M: int):
        return [r for r in self.roots if r.label == f"cluster(-{2 * M})"]


# ---------------------------------------------------------------------------
# Evaluation helpers


class _Evaluator:
    """Rounded coefficients of p, p' cached per working precision."""

    def __init__(self, poly: DensePoly):
        self.poly = poly
        self._cache = {}

    def coeffs(self, bits):
        hit = self._cache.get(bits)
        if hit is None:
            with mpmath.workprec(bits):
                cs = [to_mpf(c) for c in self.poly.coeffs]
                ds = [to_mpf(c) for c in self.poly.derivative().coeffs]
            hit = (cs, ds)
            self._cache[bits] = hit
        return hit

    def noise(self, z, bits):
        """Rounding-error scale of a Horner evaluation at z."""
        cs, _ = self.coeffs(bits)
        a = abs(z)
        acc = mpmath.mpf(0)
        for c in reversed(cs):
            acc = acc * a + abs(c)
        return mpmath.ldexp(acc, -bits + 6)

    def eval(self, z, bits):
        cs, _ = self.coeffs(bits)
        p = mpmath.mpf(0)
        dp = mpmath.mpf(0)
        for c in reversed(cs):
            dp = dp * z + p
            p = p * z + c
        return p, dp


def _norm1(poly: DensePoly, bits):
    with mpmath.workprec(bits):
        return to_mpf(poly.norm1())


# ---------------------------------------------------------------------------
# Aberth iteration


def _initial(poly: DensePoly, bits):
    n = poly.degree
    lead = abs(poly.leading)
    radius = ONE + max(abs(c) for c in poly.coeffs[:-1]) / lead
    with mpmath.workprec(bits):
        r = to_mpf(radius)
        off = mpmath.mpf(1) / 4
        return [r * mpmath.expjpi(2 * mpmath.mpf(i) / n + off / n) for i in range(n)]


def _newton_ratio_float(cs, z):
    """p/p' in double precision, using the reversed polynomial for |z| > 1
    so that large starting circles do not overflow."""
    n = len(cs) - 1
    inside = np.abs(z) <= 1
    zi = np.where(inside, z, 1.0)
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for c in cs[::-1]:
        dp = dp * zi + p
        p = p * zi + c
    y = np.where(inside, 1.0, 1.0 / z)
    r = np.zeros_like(z)
    dr = np.zeros_like(z)
    for c in cs:
        dr = dr * y + r
        r = r * y + c
    # p(z) = z^n r(1/z)  =>  p'/p = n/z - r'(y) y^2 / r(y)
    with np.errstate(all="ignore"):
        out_in = p / dp
        out_out = 1.0 / (n / z - dr * y * y / r)
    return np.where(inside, out_in, out_out)


def _aberth_float(poly: DensePoly, max_iter: int = 20000):
    """Double-precision Aberth from the Cauchy circle; returns start values
    for the multiprecision phase, or None when the coefficients do not fit
    in double range."""
    lead = max(abs(c) for c in poly.coeffs)
    try:
        cs = np.array([float(c / lead) for c in poly.coeffs])
    except OverflowError:
        return None
    if not np.all(np.isfinite(cs)) or np.any((cs == 0) & np.array([c != 0 for c in poly.coeffs])):
        return None
    with mpmath.workprec(64):
        z = np.array([complex(x) for x in _initial(poly, 64)])
    n = len(z)
    eye = np.eye(n, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            ratio = _newton_ratio_float(cs, z)
            diff = z[:, None] - z[None, :]
            diff[eye] = 1.0
            inv = 1.0 / diff
            inv[eye] = 0.0
            s = inv.sum(axis=1)
            w = ratio / (1 - ratio * s)
            if not np.all(np.isfinite(w)):
                return None
            z = z - w
            if np.max(np.abs(w) / np.maximum(np.abs(z), 1.0)) < 1e-13:
                break
    return [mpmath.mpc(complex(x)) for x in z]


def _aberth(poly: DensePoly, ev: _Evaluator, bits: int, zs=None, max_iter: int | None = None):
    n = poly.degree
    if zs is None:
        zs = _initial(poly, bits)
    max_iter = max_iter or (60 + 12 * n)
    with mpmath.workprec(bits):
        tol = mpmath.ldexp(1, -bits + 8)
        zs = [mpmath.mpc(z) for z in zs]
        done = [False] * n
        for it in range(1, max_iter + 1):
            biggest = mpmath.mpf(0)
            for i in range(n):
                if done[i]:
                    continue
                zi = zs[i]
                p, dp = ev.eval(zi, bits)
                if p == 0:
                    done[i] = True
                    continue
                ratio = p / dp if dp != 0 else mpmath.mpc(1)
                s = mpmath.mpc(0)
                for j in range(n):
                    if j != i:
                        s += 1 / (zi - zs[j])
                w = ratio / (1 - ratio * s)
                zs[i] = zi - w
                rel = abs(w) / max(abs(zs[i]), 1)
                if rel < tol or abs(p) <= ev.noise(zi, bits):
                    done[i] = True
                biggest = max(biggest, rel)
            if all(done):
                return zs, it, True
        return zs, max_iter, False


def _newton_polish(ev: _Evaluator, z, bits, steps=4, real=False):
    with mpmath.workprec(bits):
        for _ in range(steps):
            p, dp = ev.eval(z, bits)
            if dp == 0 or p == 0:
                break
            step = p / dp
            if real:
                step = mpmath.re(step)
            z = z - step
    return z


def _conjugate_cleanup(zs, bits):
    """Make real roots exactly real and complex ones exact conjugate pairs."""
    with mpmath.workprec(bits):
        tol = mpmath.ldexp(1, -bits // 3)
        reals, uppers, lowers = [], [], []
        for z in zs:
            scale = max(abs(z), 1)
            if abs(mpmath.im(z)) <= tol * scale:
                reals.append(mpmath.re(z))
            elif mpmath.im(z) > 0:
                uppers.append(z)
            else:
                lowers.append(z)
        pairs = []
        remaining = list(lowers)
        for z in sorted(uppers, key=lambda c: (mpmath.re(c), mpmath.im(c))):
            if not remaining:
                return None
            best = min(range(len(remaining)), key=lambda t: abs(remaining[t] - mpmath.conj(z)))
            w = remaining.pop(best)
            avg = (z + mpmath.conj(w)) / 2
            pairs.append(avg)
        if remaining:
            return None
        return sorted(reals), pairs


def _certify(ev: _Evaluator, poly: DensePoly, z, bits):
    n = poly.degree
    with mpmath.workprec(bits):
        p, dp = ev.eval(z, bits)
        res = abs(p)
        bound = mpmath.ldexp(_norm1(poly, bits), -bits // 2) * max(mpmath.mpf(1), abs(z)) ** n
        nw = abs(p / dp) if dp != 0 else mpmath.inf
        return res, bound, nw


def deflate(poly: DensePoly, stable_roots):
    """Divide out exact roots; returns (quotient, list of roots removed)."""
    removed = []
    for r in stable_roots:
        r = Q(r)
        lin = DensePoly([-r, 1], poly.var)
        q, rem = poly.divmod(lin)
        if rem.is_zero() and poly.degree >= 1:
            poly = q
            removed.append(r)
    return poly, removed


def find_all_roots(p: DensePoly, bits="auto", stable_roots=(0, -2), k: int | None = None,
                   window: float = DEFAULT_WINDOW, classify: bool = True) -> RootSet:
    """All complex roots of ``p`` with residual certificates.

    Exact roots in ``stable_roots`` are divided out first and reported
    separately.  ``bits`` is a starting precision or "auto" (the ladder
    128 -> 8192, capped by NEGDIM_MAX_BITS).
    """
    if p.is_zero():
        raise ValueError("zero polynomial has no finite root set")
    q, removed = deflate(p, stable_roots)
    if p.degree < 1:
        raise ValueError("polynomial must have degree >= 1")
    stable = [Root(mpmath.mpf(int(r.numerator)) / int(r.denominator), mpmath.mpf(0), mpmath.mpf(0),
                   mpmath.mpf(0), "stable-zero", None, True) for r in removed]
    start = None if bits in (None, "auto") else int(bits)
    if q.degree < 1:
        return RootSet(q, start or BITS_LADDER[0], [], stable, k, 0)
    ev = _Evaluator(q)
    zs = _aberth_float(q)
    last_err = "no attempt"
    for b in ladder(start):
        zs, its, ok = _aberth(q, ev, b, zs)
        if not ok:
            last_err = f"Aberth did not converge at {b} bits"
            continue
        cleaned = _conjugate_cleanup(zs, b)
        if cleaned is None:
            last_err = f"conjugate pairing failed at {b} bits"
            continue
        reals, pairs = cleaned
        roots = []
        good = True
        with mpmath.workprec(b):
            for x in reals:
                x = mpmath.re(_newton_polish(ev, mpmath.mpc(x), b, real=True))
                res, bound, nw = _certify(ev, q, x, b)
                good &= res <= bound
                roots.append(Root(x, res, bound, nw))
            for z in pairs:
                z = _newton_polish(ev, z, b)
                res, bound, nw = _certify(ev, q, z, b)
                good &= res <= bound
                roots.append(Root(z, res, bound, nw))
                roots.append(Root(mpmath.conj(z), res, bound, nw))
        if not good:
            last_err = f"residual certificate failed at {b} bits"
            continue
        roots = _order(roots)
        rs = RootSet(q, b, roots, stable, k, its)
        if not vieta_check(rs)["sum"]:
            last_err = f"Vieta sum check failed at {b} bits"
            continue
        if classify:
            classify_roots(rs, window)
        return rs
    raise RootNonConvergence(f"root finding failed: {last_err}")


def _order(roots):
    """Deterministic order: by real part, then |imag|, then +imag before -imag."""
    def key(r):
        v = mpmath.mpc(r.value)
        return (v.real, abs(v.imag), -v.imag)
    return sorted(roots, key=key)


def vieta_check(rs: RootSet) -> dict:
    q = rs.poly
    n = q.degree
    b = rs.bits
    with mpmath.workprec(b):
        s = mpmath.fsum(mpmath.mpc(r.value) for r in rs.roots)
        want = -to_mpf(q.coeffs[n - 1] / q.coeffs[n]) if n >= 1 else mpmath.mpf(0)
        scale = max(mpmath.mpf(1), mpmath.fsum(abs(r.value) for r in rs.roots))
        tol = mpmath.ldexp(scale, -b // 2)
        prod = mpmath.fprod(mpmath.mpc(r.value) for r in rs.roots)
        pwant = to_mpf(exact_root_product(q))
        ptol = mpmath.ldexp(mpmath.fprod(max(abs(r.value), mpmath.mpf(1)) for r in rs.roots), -b // 2)
        return {"sum": abs(s - want) <= tol, "product": abs(prod - pwant) <= ptol}


def conjugate_closed(rs: RootSet) -> bool:
    """Non-real roots come in adjacent, exactly conjugate pairs (compared at
    the working precision of the set, since negation rounds in mpmath)."""
    with mpmath.workprec(rs.bits):
        rts = [r.value for r in rs.roots]
        i = 0
        while i < len(rts):
            z = rts[i]
            if mpmath.im(z) == 0:
                i += 1
                continue
            if i + 1 >= len(rts):
                return False
            w = rts[i + 1]
            if not (mpmath.re(z) == mpmath.re(w) and mpmath.im(z) == -mpmath.im(w)):
                return False
            i += 2
    return True


def exact_root_product(q: DensePoly):
    """prod of roots = (-1)^n c_0 / c_n, exactly."""
    n = q.degree
    return (mpq(-1) ** n) * q.coeffs[0] / q.coeffs[n]


# ---------------------------------------------------------------------------
# Cluster classification and offset refinement


def classify_roots(rs: RootSet, window: float = DEFAULT_WINDOW, max_M: int | None = None) -> RootSet:
    """Label the root (or conjugate pair) strictly closest to -2M as
    cluster(-2M) when it lies within ``window``; everything else is bulk."""
    for r in rs.roots:
        r.label = "bulk"
        r.offset = None
    if not rs.roots:
        return rs
    with mpmath.workprec(rs.bits):
        lo = min(mpmath.re(r.value) for r in rs.roots)
        top_M = int(mpmath.floor(-lo / 2)) + 1 if lo < 0 else 0
        if max_M is not None:
            top_M = min(top_M, max_M)
        win = mpmath.mpf(window)
        claimed = {}
        for M in range(2, top_M + 1):
            target = -2 * M
            dists = [abs(mpmath.mpc(r.value) - target) for r in rs.roots]
            order = sorted(range(len(dists)), key=lambda i: dists[i])
            best = order[0]
            if dists[best] > win:
                continue
            group = [best]
            partner = None
            if mpmath.im(rs.roots[best].value) != 0:
                conj = mpmath.conj(rs.roots[best].value)
                for i in order[1:]:
                    if rs.roots[i].value == conj:
                        partner = i
                        break
                if partner is not None:
                    group.append(partner)
            rest = [i for i in order if i not in group]
            if rest and dists[rest[0]] <= dists[best]:
                continue  # not strictly closest
            if any(i in claimed and claimed[i] <= dists[best] for i in group):
                continue
            for i in group:
                prev = claimed.get(i)
                if prev is not None:
                    for r in rs.roots:
                        if r.label == rs.roots[i].label and r is not rs.roots[i]:
                            r.label = "bulk"
                claimed[i] = dists[best]
                rs.roots[i].label = f"cluster({target})"
        for r in rs.roots:
            if r.label.startswith("cluster"):
                M = -int(r.label[8:-1]) // 2
                r.offset = refine_offset(rs.poly, M, r.value, rs.bits)
    return rs


def refine_offset(poly: DensePoly, M: int, approx, bits: int, steps: int = 60):
    """Root offset t = nu + 2M, by Newton on the exactly shifted p(t - 2M).

    The shifted coefficients are exact rationals, so a tiny offset keeps its
    full relative accuracy regardless of how close the root is to -2M.
    """
    shifted = poly.taylor_shift(-2 * M)
    ev = _Evaluator(shifted)
    with mpmath.workprec(bits):
        t = mpmath.mpc(approx) + 2 * M
        real = mpmath.im(t) == 0
        for _ in range(steps):
            p, dp = ev.eval(t, bits)
            if dp == 0 or p == 0:
                break
            step = p / dp
            if real:
                step = mpmath.re(step)
            t = t - step
            if abs(step) <= abs(t) * mpmath.ldexp(1, -bits + 4):
                break
        return mpmath.re(t) if real else t


# ---------------------------------------------------------------------------
# Statistics


def root_distribution_stats(rs: RootSet, D=None) -> dict:
    """Exact product of the non-stable roots, geometric mean including the
    root -2, and the partial-fraction sum sum_r 1/(D - nu_r) at real D."""
    q = rs.poly
    prod = exact_root_product(q)
    n = q.degree
    kk = n + 1
    out = {"product": prod}
    with mpmath.workprec(rs.bits):
        out["geometric_mean"] = (2 * abs(to_mpf(prod))) ** (mpmath.mpf(1) / kk)
        if D is not None:
            d = to_mpf(Q(D)) if not isinstance(D, mpmath.mpf) else D
            for r in rs.roots:
                if r.value == d:
                    raise ZeroDivisionError("D coincides with a root")
            s = mpmath.fsum(1 / (d - mpmath.mpc(r.value)) for r in rs.roots)
            out["digamma_lhs"] = mpmath.re(s)
            out["digamma_exact"] = _log_derivative(q, D)
    return out


def _log_derivative(q: DensePoly, D):
    """q'(D)/q(D), exact when D is rational."""
    try:
        d = Q(D)
    except TypeError:
        return q.derivative()(D) / q(D)
    val = q(d)
    if val == 0:
        raise ZeroDivisionError("D is a root")
    return q.derivative()(d) / val
