"""``negdim`` command line: spectral, perturb, roots, asym, hill, verify.

Exit codes: 0 success, 1 verification failure, 2 configuration or I/O
error, 3 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

import mpmath

from . import __version__
from .exact import Q, parse, poly_to_json, render, to_mpf
from .spectral import PotentialError, PotentialSpec

log = logging.getLogger("negdim")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def parse_range(text: str, default_lo: int = 1) -> list:
    """Integer ranges: "60" (default_lo..60), "10..60", "5:9", "5,7,9"."""
    out = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part or ":" in part:
                a, b = part.replace("..", ":").split(":")
                lo, hi = int(a), int(b)
            elif len(text.split(",")) == 1:
                lo, hi = default_lo, int(part)
            else:
                lo = hi = int(part)
            if hi < lo:
                raise ConfigError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
    except ValueError:
        raise ConfigError(f"cannot parse range {text!r}") from None
    return sorted(set(out))


def parse_float_range(text: str) -> tuple:
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise ConfigError(f"expected lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise ConfigError(f"bad range {text!r}")
    return lo, hi, step


def parse_bits(text):
    if text in (None, "auto"):
        return "auto"
    try:
        b = int(text)
    except ValueError:
        raise ConfigError(f"--bits must be 'auto' or an integer, got {text!r}") from None
    if b < 53:
        raise ConfigError("--bits must be at least 53")
    return b


def load_potential(spec: str) -> PotentialSpec:
    if os.path.exists(spec) or spec.endswith(".json"):
        try:
            with open(spec) as fh:
                obj = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read potential file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid potential JSON: {exc}") from None
        return PotentialSpec.from_json(obj)
    return PotentialSpec.builtin(spec)


# ---------------------------------------------------------------------------
# output with header block


def config_hash(args) -> str:
    skip = {"func", "out", "report", "plot", "no_timestamp", "jobs", "verbose", "scatter_prefix"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    blob = json.dumps(cfg, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def header(args, precision) -> dict:
    h = {"negdim": __version__, "command": args.command, "config_hash": config_hash(args),
         "precision": str(precision)}
    if not args.no_timestamp:
        h["generated"] = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return h


def header_comment(h: dict, prefix: str = "# ") -> str:
    return "".join(f"{prefix}{k}: {v}\n" for k, v in h.items())


def write_text(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None


def csv_text(h: dict, columns: list, rows: list) -> str:
    buf = io.StringIO()
    buf.write(header_comment(h))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _num(x, digits: int) -> str:
    return mpmath.nstr(x, digits, strip_zeros=False, min_fixed=0, max_fixed=0) if x != 0 else "0"


# ---------------------------------------------------------------------------
# spectral


def cmd_spectral(args) -> int:
    from .spectral import build, monic_in_E
    pot = load_potential(args.potential)
    methods = ["spin-det", "c-matrix", "recursion"] if args.method == "all" else [args.method]
    entries = []
    for tj in parse_range(args.two_j, 0):
        polys = {}
        for m in methods:
            sp = build(tj, pot, m)
            p = monic_in_E(sp.poly) if args.monic else sp.poly
            polys[m] = p
            entries.append({"two_j": tj, "provenance": m, "normalization": str(sp.normalization),
                            "poly": poly_to_json(p)})
        if len(methods) > 1 and len({render(monic_in_E(p)) for p in polys.values()}) != 1:
            log.error("constructions disagree at 2j=%d", tj)
            return EXIT_VERIFY
    doc = {"header": header(args, "exact"), "potential": pot.to_json(), "polynomials": entries}
    write_text(args.out, json.dumps(doc, indent=1) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# perturb


def cmd_perturb(args) -> int:
    from .series import algebraic_branch_series, check_factorization, leading_coeff_check, series_generate
    pot = load_potential(args.potential)
    t = series_generate(pot, K=args.K)
    lines = [json.dumps({"header": header(args, "exact"), "potential": pot.to_json()})]
    for k, p in enumerate(t.terms):
        lines.append(json.dumps({"k": k, "E": poly_to_json(p)}, separators=(",", ":")))
    write_text(args.out, "\n".join(lines) + "\n")
    if args.at is not None:
        D = Q(args.at)
        rows = [(k, str(v)) for k, v in enumerate(t.at(D))]
        sys.stdout.write(csv_text(header(args, "exact"), ["k", f"E(D={args.at})"], rows))
    if args.check:
        ok = all(a and b for a, b in check_factorization(t).values())
        if pot.name == "quartic":
            ok &= all(leading_coeff_check(t).values())
            for M in (2, 3):
                ok &= t.at(-2 * M) == algebraic_branch_series(M, args.K, pot)
        print(f"series checks K={args.K}: {'PASS' if ok else 'FAIL'}")
        return EXIT_OK if ok else EXIT_VERIFY
    return EXIT_OK


def _load_series(args, kmax: int, pot: PotentialSpec) -> list:
    from .series import series_generate
    if args.series:
        terms = {}
        try:
            with open(args.series) as fh:
                for line in fh:
                    obj = json.loads(line)
                    if "k" in obj:
                        terms[obj["k"]] = parse(json.dumps(obj["E"]))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read series file: {exc}") from None
        if max(terms, default=-1) < kmax:
            raise ConfigError(f"series file stops at k={max(terms, default=-1)}, need {kmax}")
        return [terms[k] for k in range(kmax + 1)]
    return series_generate(pot, K=kmax).terms


# ---------------------------------------------------------------------------
# roots


def _roots_worker(a):
    from .roots import find_all_roots
    k, poly_json, bits, window = a
    rs = find_all_roots(parse(poly_json), bits=bits, k=k, window=window)
    rows = []
    dps = int(rs.bits * 0.30103)
    with mpmath.workprec(rs.bits + 64):
        for r in rs.roots:
            re, im = mpmath.re(r.value), mpmath.im(r.value)
            if r.offset is not None and im == 0:
                M = int(r.label.split("-")[1].rstrip(")")) // 2
                re = mpmath.re(r.offset) - 2 * M
                digits = dps + max(0, int(-mpmath.log10(abs(r.offset)))) if r.offset else dps
            else:
                digits = dps
            res = r.residual
            rexp = "-inf" if res == 0 else str(int(mpmath.floor(mpmath.log10(res))))
            rows.append((k, _num(re, digits), _num(im, dps), r.label, rexp))
    for s in rs.stable:
        rows.append((k, str(int(s.value)), "0", "stable-zero", "exact"))
    return rows, rs.bits


def cmd_roots(args) -> int:
    pot = load_potential(args.potential)
    bits = parse_bits(args.bits)
    ks = parse_range(args.orders, 2)
    if args.scatter is not None:
        ks = sorted(set(ks) | {args.scatter})
    terms = _load_series(args, max(ks), pot)
    jobs = [(k, render(terms[k]), bits, args.window) for k in ks]
    results = _map(_roots_worker, jobs, args.jobs)
    used = max(b for _, b in results) if results else 0
    rows = [r for rr, _ in results for r in rr]
    h = header(args, f"{bits} (max used {used})" if bits == "auto" else bits)
    if args.out != "none":
        write_text(args.out, csv_text(h, ["k", "re", "im", "label", "residual_exponent"], rows))
    if args.scatter is not None:
        prefix = args.scatter_prefix or f"roots{args.scatter}"
        pts = [(float(r[1]), float(r[2])) for r in rows if r[0] == args.scatter]
        data = header_comment(h) + "".join(f"{x:.17g} {y:.17g}\n" for x, y in pts)
        write_text(prefix + ".dat", data)
        write_text(prefix + ".gp", header_comment(h) + GNUPLOT_SCATTER.format(k=args.scatter, data=prefix + ".dat",
                                                                              png=prefix + ".png"))
    return EXIT_OK


GNUPLOT_SCATTER = """set terminal pngcairo size 800,600
set output '{png}'
set xlabel 'Re D'
set ylabel 'Im D'
set title 'roots of P_{k}(D)'
set grid
plot '{data}' using 1:2 with points pt 7 ps 0.8 title 'k = {k}'
"""


def _map(fn, items, jobs):
    if jobs and jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(i) for i in items]


# ---------------------------------------------------------------------------
# asym


def cmd_asym(args) -> int:
    from .asymptotics import convergence_report, predict_root_offset, singularity_data, special_D
    pot = load_potential(args.potential)
    bits = parse_bits(args.bits)
    wp = 256 if bits == "auto" else bits
    ks = parse_range(args.orders, 1)
    sd = singularity_data(args.M, pot, bits=wp)
    if args.kind == "series":
        from .series import algebraic_branch_series
        br = algebraic_branch_series(args.M, max(ks), pot)
        exact = [br[k] for k in ks]
        pred = lambda k: special_D(k, sd.c, sd.g0)
    else:
        terms = _load_series(args, max(ks), pot)
        jobs = [(k, render(terms[k]), bits, 1.0) for k in ks if k >= 2]
        found = {}
        for (k, pj, b, w), rs in zip(jobs, _map(_offset_worker, [(j, args.M) for j in jobs], args.jobs)):
            if rs is not None:
                found[k] = rs
        ks = [k for k in ks if k in found]
        exact = [found[k] for k in ks]
        pred = lambda k: predict_root_offset(args.M, k, sd)
    with mpmath.workprec(wp):
        rows = convergence_report(ks, exact, pred, wp)
    out = [(r["k"], _num(r["exact"], 20), _num(r["predicted"], 20), _num(r["ratio"], 12), r["bits"]) for r in rows]
    h = header(args, wp)
    h["singularity"] = f"E0={mpmath.nstr(sd.E0, 20)} g0={mpmath.nstr(sd.g0, 20)} c={mpmath.nstr(sd.c, 20)}"
    write_text(args.report, csv_text(h, ["k", "exact", "predicted", "ratio", "bits"], out))
    return EXIT_OK


def _offset_worker(a):
    """Real cluster(-2M) offset at order k, or None when the cluster root is
    absent or complex."""
    from .roots import find_all_roots
    (k, pj, bits, window), M = a
    rs = find_all_roots(parse(pj), bits=bits, k=k, window=window)
    cl = [r for r in rs.cluster(M) if r.is_real]
    return mpmath.re(cl[0].offset) if cl else None


# ---------------------------------------------------------------------------
# hill


def cmd_hill(args) -> int:
    from .hill import Dcal_grid, spectrum_on_grid, trace_trajectory
    pot = load_potential(args.potential)
    bits = parse_bits(args.bits)
    bits = 256 if bits == "auto" else bits
    lo, hi, step = parse_float_range(args.Dcal_range)
    grid = Dcal_grid(lo, hi, step)
    g = Q(args.g)
    spectra = spectrum_on_grid(grid, pot, g, args.levels + 2, jobs=args.jobs, N=args.N,
                               bits=bits, digits=args.digits, strict=args.strict)
    rows = []
    for lev in range(args.levels):
        for p in trace_trajectory(lev, grid, pot, g, spectra=spectra):
            rows.append((lev, repr(p.Dcal), _num(p.E, 16), p.N, f"{min(p.digits, 99):.1f}",
                         int(p.converged), p.source, p.flag))
    h = header(args, bits)
    write_text(args.out, csv_text(h, ["trajectory", "Dcal", "E", "N", "digits", "converged", "source", "flag"], rows))
    if args.plot:
        write_text(args.plot, header_comment(h) + GNUPLOT_TRAJ.format(data=args.out, levels=args.levels - 1,
                                                                      png=os.path.splitext(args.plot)[0] + ".png"))
    return EXIT_OK


GNUPLOT_TRAJ = """set terminal pngcairo size 800,600
set output '{png}'
set datafile separator ','
set xlabel 'effective dimension'
set ylabel 'E'
set key left top
set grid
plot for [n=0:{levels}] '{data}' using ($1==n ? $2 : 1/0):3 every ::1 with lines title sprintf('level %d', n), \\
     '{data}' using ($7 eq "algebraic" ? $2 : 1/0):3 with points pt 6 ps 1.2 title 'algebraic roots'
"""


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    from .verify import SUITES, run_suites, suite_combinatorics
    if args.suite == "combinatorics" and not args.all:
        return _combinatorics_matrix(args.max_M)
    names = list(SUITES) if args.all or args.suite in (None, "all") else [args.suite]
    for n in names:
        if n not in SUITES:
            raise ConfigError(f"unknown suite {n!r}; choose from {', '.join(SUITES)}")
    kw = {"combinatorics": {"max_M": args.max_M}}
    checks, times = run_suites(names, **kw)
    width = max(len(c.name) for c in checks) if checks else 10
    for c in checks:
        print(f"{c.suite:<14} {c.name:<{width}}  {'PASS' if c.passed else 'FAIL'}  {c.detail}".rstrip())
    npass = sum(c.passed for c in checks)
    print(f"\n{npass}/{len(checks)} checks passed; " +
          ", ".join(f"{n} {t:.1f}s" for n, t in times.items()))
    return EXIT_OK if npass == len(checks) else EXIT_VERIFY


def _combinatorics_matrix(max_M: int) -> int:
    from . import combinatorics as comb
    cols = ["n=rec", "n~=rec", "sum n=4^M", "sum n~=2^M", "Z-ident", "CG"]
    nt, ntt = comb.n_recursion_table(max_M), comb.n_tilde_recursion_table(max_M)
    print(f"{'M':>3}  " + "  ".join(f"{c:>10}" for c in cols))
    ok_all = True
    for M in range(max_M + 1):
        t, s = comb.degeneracy_nj(M), comb.dimension_sums(M)
        vals = [t["n"] == nt[M], t["n_tilde"] == ntt[M], s["n"] == 4 ** M, s["n_tilde"] == 2 ** M,
                all(comb.z_coefficient_identity(M).values()),
                t["n"] == comb.brute_force_decomposition(M) if M <= 8 else None]
        ok_all &= all(v for v in vals if v is not None)
        cells = ["skip" if v is None else ("PASS" if v else "FAIL") for v in vals]
        print(f"{M:>3}  " + "  ".join(f"{c:>10}" for c in cells))
    return EXIT_OK if ok_all else EXIT_VERIFY


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--potential", default="quartic",
                        help="builtin name (quartic, sextic, harmonic, randomN) or JSON file")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp header line")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="negdim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"negdim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectral", parents=[common], help="spectral polynomials R_2j(E, g)")
    s.add_argument("--two-j", default="0:4", help="range of 2j, e.g. 0:7")
    s.add_argument("--method", default="spin-det", choices=["spin-det", "c-matrix", "recursion", "all"])
    s.add_argument("--monic", action="store_true")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_spectral)

    s = sub.add_parser("perturb", parents=[common], help="exact series E^(k)(D)")
    s.add_argument("--K", type=int, default=20)
    s.add_argument("--at", default=None, help="also print E^(k) at this exact D")
    s.add_argument("--check", action="store_true", help="factorization, leading coefficients, branch series")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_perturb)

    s = sub.add_parser("roots", parents=[common], help="roots of P_k(D)")
    s.add_argument("--orders", default="5..20")
    s.add_argument("--bits", default="auto")
    s.add_argument("--window", type=float, default=1.0)
    s.add_argument("--series", default=None, help="series JSONL written by perturb")
    s.add_argument("--scatter", type=int, default=None, help="emit data + gnuplot script for this k")
    s.add_argument("--scatter-prefix", default=None)
    s.add_argument("--out", default="-", help="CSV path, '-' for stdout, 'none' to skip")
    s.set_defaults(func=cmd_roots)

    s = sub.add_parser("asym", parents=[common], help="exact vs asymptotic report")
    s.add_argument("--M", type=int, default=2)
    s.add_argument("--orders", default="60")
    s.add_argument("--kind", choices=["offset", "series"], default="offset")
    s.add_argument("--bits", default="auto")
    s.add_argument("--series", default=None)
    s.add_argument("--report", default="-")
    s.set_defaults(func=cmd_asym)

    s = sub.add_parser("hill", parents=[common], help="levels at real effective dimension")
    s.add_argument("--Dcal-range", default="-8:4:0.05")
    s.add_argument("--g", default="1")
    s.add_argument("--levels", type=int, default=6)
    s.add_argument("--N", type=int, default=200)
    s.add_argument("--digits", type=float, default=10)
    s.add_argument("--bits", default="auto")
    s.add_argument("--strict", action="store_true", help="fail (exit 3) on unconverged points")
    s.add_argument("--out", default="-")
    s.add_argument("--plot", default=None, help="gnuplot script path")
    s.set_defaults(func=cmd_hill)

    s = sub.add_parser("verify", parents=[common], help="exact identity suites")
    s.add_argument("suite", nargs="?", default=None)
    s.add_argument("--all", action="store_true")
    s.add_argument("--max-M", type=int, default=12)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    from .hill import HillNonConvergence
    from .roots import RootNonConvergence
    from .asymptotics import SingularityError

    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # "--Dcal-range -8:4:0.05" would otherwise be read as an option
    for i, a in enumerate(argv[:-1]):
        if a == "--Dcal-range":
            argv[i:i + 2] = [f"{a}={argv[i + 1]}"]
            break
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="negdim: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, PotentialError) as exc:
        print(f"negdim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RootNonConvergence, HillNonConvergence, SingularityError) as exc:
        print(f"negdim: numeric non-convergence in {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
