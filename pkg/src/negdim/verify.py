"""Exact identity suites behind ``negdim verify``.

Each suite returns a list of Check records.  Suites are deliberately
bounded in size; the K = 60 series and the full root sweep live in the
``perturb`` and ``roots`` commands.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from gmpy2 import mpq

from . import combinatorics as comb
from .exact import DensePoly, PolyMatrix, SparsePoly, det_fraction_free, parse, render, to_mpf
from .reference import (GROUND_STATE_M4_PRINTED, generic_det_reference,
                        quartic_prime_reference, quartic_tilde_reference)
from .spectral import (PotentialSpec, harmonic_tilde, large_E_coefficients, large_E_formula,
                       monic_in_E, quartic_prime_parts, quartic_tilde, spectral_poly_cmatrix,
                       spectral_poly_recursion, spectral_poly_spin)
from .spin import check_sl2, make_spin_matrices, tensor_factorization, trace_JpJm, trace_Jp2Jm2, trace_word


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""


def _c(suite, name, ok, detail=""):
    return Check(suite, name, bool(ok), detail)


# ---------------------------------------------------------------------------


def suite_exact(seed: int = 7) -> list:
    rng = random.Random(seed)
    rq = lambda: mpq(rng.randint(-9, 9), rng.randint(1, 5))
    dp = lambda: DensePoly([rq() for _ in range(rng.randint(0, 5))], "D")
    out = []
    ring = True
    divmod_ok = True
    for _ in range(40):
        a, b, c = dp(), dp(), dp()
        ring &= (a * (b + c) == a * b + a * c) and ((a * b) * c == a * (b * c)) and (a - a == DensePoly([], "D"))
        if b:
            q, r = a.divmod(b)
            divmod_ok &= (q * b + r == a) and (not r or r.degree < b.degree)
    out.append(_c("exact", "dense ring axioms", ring))
    out.append(_c("exact", "dense division identity", divmod_ok))
    vs = ("E", "g")
    E, g = SparsePoly.gen("E", vs), SparsePoly.gen("g", vs)
    p = (E ** 3 - E * 4 - g * 16) * (E + g * 2 - 1)
    out.append(_c("exact", "sparse exact quotient", p.exquo(E + g * 2 - 1) == E ** 3 - E * 4 - g * 16))
    out.append(_c("exact", "JSON round trip", parse(render(p)) == p))
    # Bareiss against cofactor expansion on a 4x4 polynomial matrix
    m = [[SparsePoly.const(rq(), vs) + E * rq() + g * rq() for _ in range(4)] for _ in range(4)]

    def cof(a):
        if len(a) == 1:
            return a[0][0]
        acc = SparsePoly(vs, {})
        for j in range(len(a)):
            minor = [r[:j] + r[j + 1:] for r in a[1:]]
            t = a[0][j] * cof(minor)
            acc = acc + t if j % 2 == 0 else acc - t
        return acc
    out.append(_c("exact", "Bareiss = cofactor (4x4)", det_fraction_free(PolyMatrix(m)) == cof(m)))
    return out


def suite_spin(max_two_j: int = 12) -> list:
    out = []
    for basis in ("monomial", "standard"):
        ok = all(all(check_sl2(make_spin_matrices(tj, basis)).values()) for tj in range(max_two_j + 1))
        out.append(_c("spin", f"sl2 relations ({basis}, 2j<={max_two_j})", ok))
    ok = all(trace_word(tj, "+-") == trace_JpJm(tj) and trace_word(tj, "++--") == trace_Jp2Jm2(tj)
             for tj in range(max_two_j + 1))
    out.append(_c("spin", "trace identities", ok))
    for M in range(1, 7):
        const, mult, ok = tensor_factorization(M, PotentialSpec.quartic())
        expect = comb.degeneracy_nj(M)["n_tilde"]
        out.append(_c("spin", f"tensor factorization M={M}", ok and mult == expect, str(mult)))
    return out


def suite_spectral(max_two_j: int = 12) -> list:
    out = []
    ref = quartic_tilde_reference()
    out.append(_c("spectral", "R~_0..R~_3 closed forms", all(quartic_tilde(tj) == p for tj, p in ref.items())))
    ref = quartic_prime_reference()
    out.append(_c("spectral", "R~'_1..R~'_7 list", all(quartic_prime_parts(tj) == p for tj, p in ref.items())))
    G = PotentialSpec.generic(4)
    ref = generic_det_reference()
    out.append(_c("spectral", "det C^(0..4), generic w",
                  all(spectral_poly_cmatrix(tj, G).det == p for tj, p in ref.items())))
    out.append(_c("spectral", "harmonic closed form 2j<=8",
                  all(spectral_poly_spin(tj, PotentialSpec.harmonic()).poly == harmonic_tilde(tj)
                      for tj in range(9))))
    for pot in (PotentialSpec.quartic(), PotentialSpec.sextic(), PotentialSpec.random(seed=3)):
        ok = True
        for tj in range(max_two_j + 1):
            a = monic_in_E(spectral_poly_spin(tj, pot).poly)
            b = monic_in_E(spectral_poly_cmatrix(tj, pot).poly)
            c = monic_in_E(spectral_poly_recursion(tj, pot).poly)
            ok &= (a == b == c)
        out.append(_c("spectral", f"spin = C-matrix = recursion ({pot.name}, 2j<={max_two_j})", ok))
    G = PotentialSpec.generic(3)
    ok = all(large_E_coefficients(tj, G) == large_E_formula(tj, G) for tj in range(2, 9))
    out.append(_c("spectral", "large-E coefficients, generic w", ok))
    return out


def suite_series(K: int = 20) -> list:
    from .series import (algebraic_branch_series, cardano_series, check_factorization,
                         leading_coeff_check, series_generate)
    out = []
    t = series_generate(K=K)
    out.append(_c("series", f"D(D+2) | E^(k), deg = k+1 (k<={K})",
                  all(a and b for a, b in check_factorization(t).values())))
    out.append(_c("series", f"leading coefficient = beta_k (k<={K})", all(leading_coeff_check(t).values())))
    for M in (2, 3):
        br = algebraic_branch_series(M, K)
        out.append(_c("series", f"E^(k)(-{2 * M}) = branch series of R_{M} (k<={K})", t.at(-2 * M) == br))
    card = cardano_series(min(K, 12))
    out.append(_c("series", "D=-4 series = Cardano expansion", t.at(-4)[:len(card)] == card))
    printed = t.at(-4)[:8]
    diffs = [k for k in range(8) if printed[k] != GROUND_STATE_M4_PRINTED[k]]
    out.append(_c("series", "printed D=-4 coefficients (order 6 misprinted as 3003/16)", diffs == [6],
                  f"differing orders: {diffs}"))
    out.append(_c("series", "stable roots E^(k)(0) = E^(k)(-2) = 0",
                  all(p(0) == 0 and p(-2) == 0 for p in t.terms[1:])))
    return out


def suite_roots(orders=(7, 10, 11, 20)) -> list:
    from .roots import conjugate_closed, find_all_roots, vieta_check
    from .series import series_generate
    expected = {10: "0.04231592827", 11: "-0.01231265412", 20: "6.32321355e-11"}
    t = series_generate(K=max(orders))
    out = []
    for k in orders:
        rs = find_all_roots(t.terms[k], k=k)
        v = vieta_check(rs)
        out.append(_c("roots", f"k={k} Vieta sum/product", v["sum"] and v["product"]))
        out.append(_c("roots", f"k={k} conjugate closure", conjugate_closed(rs)))
        if k == 7:
            cl = rs.cluster(2)
            ok = len(cl) == 2 and abs(mpmath.re(cl[0].value) + mpmath.mpf("3.63083")) < 5e-6
            out.append(_c("roots", "k=7 complex pair near -4", ok))
        if k in expected:
            cl = [r for r in rs.cluster(2) if r.is_real]
            ref = mpmath.mpf(expected[k])
            ok = len(cl) == 1 and abs(mpmath.re(cl[0].offset) - ref) <= 1e-8 * abs(ref)
            out.append(_c("roots", f"k={k} offset near -4", ok,
                          mpmath.nstr(mpmath.re(cl[0].offset), 12) if cl else "missing"))
    return out


def suite_asym() -> list:
    from .asymptotics import (closed_form_M2, closed_form_M3, consistency_identity_M2,
                              exact_M2_certificate, predict_root_offset, radius_estimate,
                              singularity_data)
    from .series import algebraic_branch_series
    out = []
    cert = exact_M2_certificate()
    c = cert["c"]
    out.append(_c("asym", "M=2 exact double root, c = 8/9",
                  cert["R"] and cert["RE"] and c.b == 0 and c.a == mpq(8, 9)))
    out.append(_c("asym", "special-D consistency identity", all(consistency_identity_M2().values())))
    with mpmath.workprec(256):
        for M, cf in ((2, closed_form_M2), (3, closed_form_M3)):
            sd = singularity_data(M)
            ref = cf(256)
            err = max(abs(sd.E0 - ref["E0"]), abs(sd.g0 - ref["g0"]), abs(sd.c - ref["c"]))
            out.append(_c("asym", f"M={M} singularity data to 1e-30", err < mpmath.mpf(10) ** -30,
                          mpmath.nstr(err, 3)))
            br = algebraic_branch_series(M, 60)
            r = radius_estimate(br, 40, 60)
            out.append(_c("asym", f"M={M} series radius within 2% of g0",
                          abs(r / abs(sd.g0) - 1) < 0.02, mpmath.nstr(r, 10)))
        exact11 = mpmath.mpf("-0.01231265412")
        p = predict_root_offset(2, 11)
        out.append(_c("asym", "M=2, k=11 offset prediction within 7%", abs(exact11 / p - 1) < 0.07,
                      mpmath.nstr(exact11 / p, 6)))
    return out


def suite_combinatorics(max_M: int = 12) -> list:
    out = []
    nt = comb.n_recursion_table(max_M)
    ntt = comb.n_tilde_recursion_table(max_M)
    for M in range(max_M + 1):
        t = comb.degeneracy_nj(M)
        s = comb.dimension_sums(M)
        out.append(_c("combinatorics", f"M={M} n closed = recursion", t["n"] == nt[M]))
        out.append(_c("combinatorics", f"M={M} n~ closed = recursion", t["n_tilde"] == ntt[M]))
        out.append(_c("combinatorics", f"M={M} n = Clebsch-Gordan count",
                      t["n"] == comb.brute_force_decomposition(M) if M <= 8 else True))
        out.append(_c("combinatorics", f"M={M} sum (2j+1) n = 4^M", s["n"] == 4 ** M))
        out.append(_c("combinatorics", f"M={M} sum (2j+1) n~ = 2^M", s["n_tilde"] == 2 ** M))
        out.append(_c("combinatorics", f"M={M} Z coefficient identity", all(comb.z_coefficient_identity(M).values())))
    return out


def suite_hill() -> list:
    from .hill import find_merge, hill_eigenvalues
    out = []
    ok = True
    for D in (-5.5, -1.3, 0.7, 3.0):
        pts = hill_eigenvalues(D, PotentialSpec.harmonic(), 0, count=4)
        ok &= all(abs(p.E - (mpmath.mpf(Fraction(D).numerator) / Fraction(D).denominator / 2 + 2 * i)) < 1e-10
                  for i, p in enumerate(pts))
    out.append(_c("hill", "g=0 levels = Dcal/2 + 2n", ok))
    pts = hill_eigenvalues(-4, g=1, count=3, algebraic=False)
    with mpmath.workprec(128):
        cubic = [mpmath.re(r) for r in mpmath.polyroots([1, 0, -4, -16]) if abs(mpmath.im(r)) < 1e-20]
    out.append(_c("hill", "Dcal=-4 truncation contains the cubic root",
                  any(abs(p.E - cubic[0]) < 1e-10 for p in pts), mpmath.nstr(cubic[0], 15)))
    m = find_merge(-2.4, -2.8)
    out.append(_c("hill", "ground/first-excited merge in (-2.8, -2.4)", -2.8 < m.Dcal < -2.4,
                  mpmath.nstr(m.Dcal, 10)))
    return out


SUITES = {
    "exact": suite_exact,
    "spin": suite_spin,
    "spectral": suite_spectral,
    "series": suite_series,
    "roots": suite_roots,
    "asym": suite_asym,
    "combinatorics": suite_combinatorics,
    "hill": suite_hill,
}


def run_suites(names, **kw) -> tuple:
    """Run the named suites; returns (checks, {suite: seconds})."""
    checks, times = [], {}
    for name in names:
        t0 = time.perf_counter()
        fn = SUITES[name]
        checks.extend(fn(**kw.get(name, {})))
        times[name] = time.perf_counter() - t0
    return checks, times
