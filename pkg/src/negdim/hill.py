"""Levels E_n(Dcal) at arbitrary real effective dimension by truncating the
zeta power-series recursion (Hill determinant).

With psi = exp(-zeta) sum_n a_n zeta^n the Schroedinger equation becomes
B a = E a with

    B[n, n]     = 2n + Dcal/2
    B[n, n+1]   = -(n+1)(n + Dcal/2)
    B[n, n-m]   = w_m - delta_{m,1}        (m >= 1)

Truncating at N rows, det(B_N - E) is proportional to the continuant

    q_0 = 1,
    q_{n+1} = (2n + Dcal/2 - E) q_n + sum_m u_m q_{n-m} prod_{i=n-m}^{n-1} (i+1)(i + Dcal/2)

which stays finite at negative even Dcal, where it factors into the
spectral polynomial times the block belonging to 4 - Dcal.

Eigenvalues found here carry only empirical convergence evidence
(agreement between truncations N and N + dN).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
import math

import mpmath
import numpy as np

from .exact import Q, to_mpf
from .spectral import PotentialSpec, spectral_poly_spin


class HillNonConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class TrajectoryPoint:
    Dcal: float
    level: int
    E: object           # mpf
    N: int
    digits: float
    converged: bool
    source: str = "hill"     # "hill" or "algebraic"
    flag: str = ""           # "", "merge", "ambiguous", "unconverged"


def _is_negative_even(Dcal) -> int | None:
    """two_j if Dcal == -4j for some j >= 0 (Dcal in {0, -2, -4, ...}), else None."""
    try:
        d = Q(Dcal) if not isinstance(Dcal, float) else Q(Fraction(Dcal))
    except TypeError:
        d = Q(Fraction(str(mpmath.nstr(Dcal, 30))))
    if d <= 0 and d.denominator == 1 and d.numerator % 2 == 0:
        return int(-d.numerator // 2)
    return None


def dressed_coefficients(potential: PotentialSpec, g) -> dict:
    """u_m = w_m(g) - delta_{m,1} as exact rationals (g exact or float)."""
    gq = Q(Fraction(g)) if isinstance(g, float) else Q(g)
    out = {}
    for m, wm in potential.items_g():
        v = wm(gq) - (1 if m == 1 else 0)
        if v:
            out[m] = v
    return out


class HillProblem:
    """Continuant machinery at fixed (Dcal, potential, g)."""

    def __init__(self, Dcal, potential: PotentialSpec | None = None, g=1, bits: int = 256):
        self.potential = potential or PotentialSpec.quartic()
        self.Dcal = Dcal
        self.g = g
        self.bits = bits
        self.u = dressed_coefficients(self.potential, g)
        self._w = {}

    # -- float scan, vectorised over E
    def scan(self, Es: np.ndarray, N: int) -> np.ndarray:
        """Sign-faithful values of a_N(E) (the normalised coefficient)."""
        D = float(self.Dcal)
        us = [(m, float(v)) for m, v in self.u.items()]
        L = max([m for m, _ in us], default=1)
        # at Dcal = -2p the factor (p + Dcal/2) vanishes: it is dropped from
        # the normalisation, and couplings reaching across row p carry it
        p = _is_negative_even(self.Dcal)
        hist = [np.ones_like(Es)]
        for n in range(N):
            s = (2 * n + D / 2 - Es) * hist[-1]
            for m, v in us:
                if n - m >= 0 and not (p is not None and n - m <= p <= n - 1):
                    s = s + v * hist[-1 - m]
            den = (n + 1) * (n + D / 2)
            s = s / (den if den != 0 else (n + 1))
            hist.append(s)
            if len(hist) > L + 1:
                hist.pop(0)
            scale = np.max(np.abs(np.array(hist)), axis=0)
            scale[scale == 0] = 1.0
            scale[~np.isfinite(scale)] = 1.0
            if np.any((scale > 1e150) | (scale < 1e-150)):
                hist = [h / scale for h in hist]
        return hist[-1]

    # -- multiprecision continuant
    def _weights(self, N):
        if N not in self._w:
            D = to_mpf(Q(Fraction(self.Dcal))) if isinstance(self.Dcal, float) else mpmath.mpf(self.Dcal)
            W = []
            for n in range(N):
                row = {}
                for m in self.u:
                    if n - m >= 0:
                        p = mpmath.mpf(1)
                        for i in range(n - m, n):
                            p *= (i + 1) * (i + D / 2)
                        row[m] = to_mpf(self.u[m]) * p
                W.append(row)
            self._w[N] = (D, W)
        return self._w[N]

    def continuant(self, E, N: int):
        """(q_N(E), dq_N/dE) at the current mpmath precision."""
        D, W = self._weights(N)
        q = [mpmath.mpf(1)]
        dq = [mpmath.mpf(0)]
        for n in range(N):
            c = 2 * n + D / 2 - E
            s = c * q[n]
            ds = c * dq[n] - q[n]
            for m, w in W[n].items():
                s += w * q[n - m]
                ds += w * dq[n - m]
            q.append(s)
            dq.append(ds)
        return q[N], dq[N]

    def refine(self, a, b, N: int):
        """Safeguarded Newton on q_N inside a sign-change bracket [a, b]."""
        with mpmath.workprec(self.bits):
            a, b = mpmath.mpf(a), mpmath.mpf(b)
            fa, _ = self.continuant(a, N)
            fb, _ = self.continuant(b, N)
            if fa == 0:
                return a
            if fb == 0:
                return b
            if fa * fb > 0:
                return None
            x = (a + b) / 2
            tol = mpmath.mpf(2) ** (-(self.bits * 3 // 4)) * max(1, abs(x))
            for _ in range(4 * self.bits):
                f, df = self.continuant(x, N)
                if f == 0:
                    return x
                if f * fa > 0:
                    a, fa = x, f
                else:
                    b = x
                step = f / df if df else None
                nx = x - step if step is not None else None
                if nx is None or not (min(a, b) < nx < max(a, b)):
                    nx = (a + b) / 2
                if abs(nx - x) < tol or abs(b - a) < tol:
                    return nx
                x = nx
            return x

    def real_roots(self, N: int, lo: float, hi: float, step: float, count: int) -> list:
        """Lowest ``count`` real roots of q_N in [lo, hi], extending hi."""
        roots = []
        start = lo
        span = hi - lo
        while len(roots) < count and start < lo + 8 * span:
            Es = np.arange(start, start + span + step / 2, step)
            v = self.scan(Es, N)
            sg = np.sign(v)
            idx = np.nonzero(sg[:-1] * sg[1:] < 0)[0]
            for i in idx:
                r = self.refine(Es[i], Es[i + 1], N)
                if r is not None:
                    roots.append(r)
                if len(roots) >= count:
                    break
            start = Es[-1]
        return roots[:count]


def _agreement(a, b) -> float:
    d = abs(a - b)
    if d == 0:
        return float("inf")
    return float(-mpmath.log10(d / max(1, abs(b))))


def algebraic_levels(two_j: int, potential: PotentialSpec, g, bits: int = 256) -> list:
    """Real roots of R_{2j}(E, g) ascending, as mpf."""
    gq = Q(Fraction(g)) if isinstance(g, float) else Q(g)
    p = spectral_poly_spin(two_j, potential).at_g(gq).to_dense()
    with mpmath.workprec(bits):
        coeffs = [to_mpf(c) for c in reversed(p.coeffs)]
        if len(coeffs) == 1:
            return []
        rts = mpmath.polyroots(coeffs, maxsteps=400, extraprec=2 * bits)
        eps = mpmath.mpf(2) ** (-bits // 2)
        real = [mpmath.re(r) for r in rts if abs(mpmath.im(r)) <= eps * max(1, abs(r))]
    return sorted(real)


def hill_eigenvalues(Dcal, potential: PotentialSpec | None = None, g=1, count: int = 4,
                     N: int = 200, dN: int = 100, bits: int = 256, digits: float = 10,
                     N_cap: int = 640, lo=None, span: float = 40.0, step: float = 0.01,
                     algebraic: bool = True, strict: bool = False) -> list:
    """``count`` lowest real levels at effective dimension Dcal.

    At Dcal = 0, -2, -4, ... (and ``algebraic`` set) the real roots of the
    spectral polynomial are merged with the levels at 4 - Dcal.  Elsewhere
    truncations N, N + dN, 2(N + dN), ... are compared pairwise until the
    lowest levels agree to ``digits``, or N would exceed ``N_cap``.
    """
    potential = potential or PotentialSpec.quartic()
    two_j = _is_negative_even(Dcal)
    if two_j is not None and algebraic:
        alg = [TrajectoryPoint(float(Dcal), 0, e, 0, float("inf"), True, "algebraic")
               for e in algebraic_levels(two_j, potential, g, bits)]
        rest = hill_eigenvalues(4 - Dcal, potential, g, count, N, dN, bits, digits, N_cap,
                                lo, span, step, algebraic, strict)
        rest = [replace(p, Dcal=float(Dcal)) for p in rest]
        merged = sorted(alg + rest, key=lambda p: p.E)[:count]
        return [replace(p, level=i) for i, p in enumerate(merged)]
    if lo is None:
        lo = min(float(Dcal) / 2, 0.0) - 10.0
    prob = HillProblem(Dcal, potential, g, bits)
    n_prev, n = N, N + dN
    r1 = prob.real_roots(n_prev, lo, lo + span, step, count)
    while True:
        r2 = prob.real_roots(n, lo, lo + span, step, count)
        pts = []
        for i, e in enumerate(r2):
            dig = max((_agreement(x, e) for x in r1), default=0.0)
            pts.append(TrajectoryPoint(float(Dcal), i, e, n, dig, dig >= digits,
                                       "hill", "" if dig >= digits else "unconverged"))
        if len(pts) == count and all(p.converged for p in pts):
            return pts
        if 2 * n > N_cap:
            if strict:
                raise HillNonConvergence(f"Dcal={Dcal}: levels not converged at N={n}")
            return pts
        n_prev, n, r1 = n, 2 * n, r2


def hill_ground_states_g0(Dcal, count=4, **kw):
    """Harmonic check helper: exact 2n + Dcal/2 next to the Hill values."""
    pts = hill_eigenvalues(Dcal, PotentialSpec.harmonic(), 0, count, **kw)
    return [(p.E, mpmath.mpf(Dcal) / 2 + 2 * i) for i, p in enumerate(pts)]


# ---------------------------------------------------------------------------
# Trajectories


def Dcal_grid(lo: float, hi: float, step: float, avoid_even: bool = True) -> list:
    """Grid from lo to hi; when ``avoid_even`` is set, points landing on
    negative even integers are kept (they are filled algebraically)."""
    n = int(math.floor((hi - lo) / step + 1e-9))
    return [round(lo + i * step, 12) for i in range(n + 1)]


def spectrum_on_grid(grid, potential=None, g=1, levels: int = 6, jobs: int = 1, **kw) -> list:
    """hill_eigenvalues for each grid point; order follows ``grid``."""
    args = [(D, potential, g, levels, kw) for D in grid]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_grid_worker, args))
    return [_grid_worker(a) for a in args]


def _grid_worker(a):
    D, potential, g, levels, kw = a
    return hill_eigenvalues(D, potential, g, levels, **kw)


def trace_trajectory(level: int, grid, potential=None, g=1, spectra=None,
                     match_tol: float = 0.5, from_top: bool = True, **kw) -> list:
    """Follow one level across ``grid`` by nearest match.

    The walk starts at the largest Dcal (``from_top``), where the level
    index is the ordinary one, and moves down.  It stops with a "merge"
    point once no real level is left within ``match_tol`` (widened by
    2|dDcal| for coarse grids) of the linear extrapolation (the level went
    complex); two candidates within
    ``match_tol / 10`` of each other mark "ambiguous".  Points come back in
    increasing Dcal.
    """
    if spectra is None:
        spectra = spectrum_on_grid(grid, potential, g, level + 3, **kw)
    pairs = list(zip(grid, spectra))
    if from_top:
        pairs.reverse()
    out = []
    prev = None
    prev_slope = 0.0
    prev_D = None
    for D, pts in pairs:
        if prev is None:
            if level >= len(pts):
                break
            prev = pts[level]
            prev_D = float(D)
            out.append(replace(prev, level=level))
            continue
        guess = float(prev.E) + prev_slope
        tol = match_tol + 2 * abs(float(D) - prev_D)
        prev_D = float(D)
        cands = sorted(pts, key=lambda p: abs(float(p.E) - guess))
        if not cands or abs(float(cands[0].E) - guess) > tol:
            out.append(TrajectoryPoint(float(D), level, prev.E, prev.N, 0.0, False,
                                       prev.source, "merge"))
            break
        best = cands[0]
        flag = best.flag
        if len(cands) > 1 and abs(float(cands[1].E) - float(best.E)) < match_tol / 10:
            flag = "ambiguous"
        prev_slope = float(best.E) - float(prev.E)
        out.append(replace(best, level=level, flag=flag))
        prev = best
    out.sort(key=lambda p: p.Dcal)
    return out


# ---------------------------------------------------------------------------
# Level merging


@dataclass(frozen=True)
class MergePoint:
    Dcal: object
    E: object
    N: int
    bracket: tuple


def _pair_real(prob_factory, D, window, N, step):
    prob = prob_factory(D)
    Es = np.arange(window[0], window[1], step)
    v = prob.scan(Es, N)
    sg = np.sign(v)
    idx = np.nonzero(sg[:-1] * sg[1:] < 0)[0]
    return [Es[i] for i in idx]


def find_merge(D_real: float, D_complex: float, potential=None, g=1, window=(-3.0, 3.0),
               N: int = 200, bits: int = 256, step: float = 1e-3, iters: int = 30) -> MergePoint:
    """Dcal where the two lowest levels in ``window`` collide.

    Bisection on the number of real roots in ``window`` (two at D_real, none
    at D_complex), then Newton on (q_N, dq_N/dE) = 0 in (E, Dcal).
    """
    potential = potential or PotentialSpec.quartic()
    make = lambda D: HillProblem(D, potential, g, bits)
    a, b = float(D_real), float(D_complex)
    ra = _pair_real(make, a, window, N, step)
    rb = _pair_real(make, b, window, N, step)
    if len(ra) < 2 or len(rb) != 0:
        raise ValueError("bracket does not straddle a merge of two real levels")
    e_guess = (ra[0] + ra[1]) / 2
    for _ in range(iters):
        m = (a + b) / 2
        r = _pair_real(make, m, window, N, step)
        if len(r) >= 2:
            a, e_guess = m, (r[0] + r[1]) / 2
        else:
            b = m
    with mpmath.workprec(bits):
        def F(E, D):
            prob = HillProblem(D, potential, g, bits)
            prob._w = {}
            Dm = mpmath.mpf(D)
            prob.Dcal = Dm
            q, dq = prob.continuant(E, N)
            scale = _scale(Dm, N)
            return q / scale, dq / scale
        x = mpmath.findroot(F, (mpmath.mpf(e_guess), mpmath.mpf((a + b) / 2)),
                            tol=mpmath.mpf(2) ** (-bits // 2), maxsteps=60)
        E, D = x[0], x[1]
    return MergePoint(D, E, N, (a, b))


def _scale(D, N):
    p = mpmath.mpf(1)
    for i in range(N):
        p *= (i + 1) * max(1, abs(i + D / 2))
    return p
