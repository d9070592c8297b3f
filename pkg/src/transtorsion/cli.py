"""Command-line front end.

    transtorsion analyze --special-case --delta 1 --lambda 0.5 --nu 1 -n 2
    transtorsion sweep --special-case --delta-values 0,1 --nu-values 0,1 --n-range 1:20 --output s.csv
    transtorsion asymptotics --special-case --delta 1 --n-range 5:30:5
    transtorsion simulate --seeds 0,1,2 -k 6
    transtorsion verify [--suite NAME ...]

Exit codes: 0 ok, 1 verify failure, 2 oracle mismatch, 3 conditioning guard,
5 asymptotics gate (not strongly transverse / no torsion), 6 return time not
yet hyperbolic, 64 usage error, 74 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .asymptotics import SpecialCaseParams, asymptotic_table, exact_factor_residual, printed_factor_residual
from .config import PRECISION_MODES, RunConfig, using_tolerances
from .dynamics import (
    GOLDEN_OMEGA,
    WindowConfig,
    itinerary,
    measured_expansion,
    orbit_csv,
    rotation_warning,
    search_itinerary,
)
from .errors import (
    ConditioningExceeded,
    NonSymplectic,
    NotPalindromic,
    NotStronglyTransverse,
    NotWithTorsion,
    NotYetHyperbolic,
    OracleMismatch,
)
from .homoclinic import HomoclinicMatrix, special_case_matrix, symplectic_ensemble, transversality_report
from .linear_model import LinearModelParams, max_n
from .spectrum import full_report, is_hyperbolic
from .symplectic import Vec4, wrap_angle

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_ORACLE = 2
EXIT_CONDITIONING = 3
EXIT_GATE = 5
EXIT_NOT_HYPERBOLIC = 6
EXIT_USAGE = 64
EXIT_IO = 74

SWEEP_COLUMNS = ("lambda", "nu", "pi", "n", "Delta", "d22", "A", "B", "classification",
                 "min_unit_circle_distance", "N0_running")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _diag(msg):
    """Diagnostics on stderr, red when TT_SPEC_COLOR is auto and stderr is a terminal."""
    color = os.environ.get("TT_SPEC_COLOR", "auto")
    if color == "auto" and sys.stderr.isatty():
        msg = f"\033[31m{msg}\033[0m"
    print(msg, file=sys.stderr)


# argument helpers


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma separated reals, got {text!r}") from exc


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from exc


def _int_range(text):
    """'a:b' or 'a:b:step', inclusive."""
    try:
        parts = [int(x) for x in text.split(":")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a:b or a:b:step, got {text!r}") from exc
    if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] <= 0):
        raise argparse.ArgumentTypeError(f"expected a:b or a:b:step, got {text!r}")
    step = parts[2] if len(parts) == 3 else 1
    return list(range(parts[0], parts[1] + 1, step))


def _positive_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("expected a nonnegative integer")
    return v


def _common(parser, suppress):
    d = {"default": argparse.SUPPRESS} if suppress else {}
    g = parser.add_argument_group("global options")
    g.add_argument("--config", metavar="PATH", **d, help="JSON run configuration; flags override it")
    g.add_argument("--precision", choices=PRECISION_MODES + ("exact_rational",), **d)
    g.add_argument("--seed", type=int, **d)
    g.add_argument("--jobs", type=int, **d, help="worker processes (default: CPU count)")
    g.add_argument("--output", metavar="PATH", **d, help="write the result here instead of stdout")
    g.add_argument("--format", choices=("csv", "json"), **d)
    for name in ("spec", "hyp", "rank", "eig"):
        g.add_argument(f"--tol-{name}", type=float, **d)


def _matrix_args(parser):
    g = parser.add_argument_group("homoclinic matrix")
    g.add_argument("--pi", metavar="FILE|identity", help="16 reals row-major in (phi, s, rho, u), or 'identity'")
    g.add_argument("--special-case", action="store_true", help="identity with delta in the (rho, phi) entry")
    g.add_argument("--delta", type=float, help="shear parameter for --special-case")
    g.add_argument("--allow-nonsymplectic", action="store_true", help="accept a non-symplectic Pi (dense oracle only)")


def _model_args(parser, omega=0.0):
    parser.add_argument("--lambda", dest="lam", type=float, default=0.5)
    parser.add_argument("--nu", type=float, default=1.0)
    parser.add_argument("--omega", type=float, default=omega)


def build_parser():
    parser = _Parser(prog="transtorsion", description="Transversality-torsion spectra of homoclinic transition maps.")
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="spectrum of Pi . Df_l**n")
    _common(p, suppress=True)
    _matrix_args(p)
    _model_args(p)
    p.add_argument("-n", type=int, required=True)

    p = sub.add_parser("sweep", help="classification over a parameter grid")
    _common(p, suppress=True)
    p.add_argument("--lambda-values", type=_floats, default=[0.5])
    p.add_argument("--nu-values", type=_floats, default=[1.0])
    p.add_argument("--n-range", type=_int_range, required=True)
    p.add_argument("--special-case", action="store_true")
    p.add_argument("--delta-values", type=_floats)
    p.add_argument("--pi", metavar="FILE")
    p.add_argument("--ensemble", type=_positive_int, metavar="COUNT", help="seeded random symplectic Pi")

    p = sub.add_parser("asymptotics", help="large-n eigenvalue laws")
    _common(p, suppress=True)
    _matrix_args(p)
    _model_args(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--n-list", type=_ints)
    g.add_argument("--n-range", type=_int_range)

    p = sub.add_parser("simulate", help="window-map itineraries")
    _common(p, suppress=True)
    _matrix_args(p)
    _model_args(p, omega=GOLDEN_OMEGA)
    p.add_argument("--p-plus", type=_floats, default=[0.0, 1.0], metavar="PHI,S")
    p.add_argument("--p-minus", type=_floats, metavar="PHI,U", help="default: phi+ + N*omega, u = 1")
    p.add_argument("--return-time", type=int, default=5, metavar="N", help="return time aligned by the default p-")
    p.add_argument("--radius", type=float, default=0.1)
    p.add_argument("--mu", type=float)
    p.add_argument("-k", type=_positive_int, default=6, help="window-map iterations")
    p.add_argument("--seeds", type=_ints, help="search seeds (default: --seed)")
    p.add_argument("--start", type=_floats, metavar="C1,C2,C3,C4", help="replay this window point instead of searching")
    p.add_argument("--orbit-csv", metavar="PATH", help="dump the longest orbit as CSV")

    p = sub.add_parser("verify", help="run the property suites")
    _common(p, suppress=True)
    p.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    p.add_argument("--list", action="store_true", help="list suite names")
    return parser


# configuration


def _run_config(args, validate=True):
    cfg = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    tol = cfg.tolerances
    overrides = {f"tol_{k}": getattr(args, f"tol_{k}") for k in ("spec", "hyp", "rank", "eig")
                 if getattr(args, f"tol_{k}", None) is not None}
    tol = replace(tol, **overrides)
    mode = getattr(args, "precision", None) or cfg.precision_mode
    if mode == "exact_rational":
        mode = "exact"
    seed = cfg.seed if getattr(args, "seed", None) is None else args.seed
    cfg = RunConfig(precision_mode=mode, tolerances=tol, seed=seed)
    return cfg.validate() if validate else cfg


def _jobs(args):
    jobs = getattr(args, "jobs", None)
    return jobs if jobs else (os.cpu_count() or 1)


def _matrix(args, mode):
    if args.special_case:
        if args.delta is None:
            raise UsageError("--special-case needs --delta")
        return special_case_matrix(args.delta)
    if args.pi is None:
        raise UsageError("give --pi FILE|identity or --special-case --delta REAL")
    validate = not args.allow_nonsymplectic
    if args.pi == "identity":
        return HomoclinicMatrix.identity()
    return HomoclinicMatrix.from_file(args.pi, exact=mode == "exact", validate=validate)


def _params(args):
    return LinearModelParams(omega=args.omega, nu=args.nu, lam=args.lam)


def write_atomic(path, text):
    """Write via a temporary file in the target directory and rename it into place."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text):
    out = getattr(args, "output", None)
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


# commands


def cmd_analyze(args, cfg):
    h = _matrix(args, cfg.precision_mode)
    p = _params(args)
    report = full_report(h, p, args.n, cfg.precision_mode)
    out = report.to_dict()
    tr = transversality_report(h)
    out["transversality"] = {"Delta": tr.delta, "d22": tr.d22, "transverse": tr.transverse,
                             "strongly_transverse": tr.strongly_transverse}
    if args.special_case:
        sc = SpecialCaseParams(args.delta, p, args.n)
        lam = float(p.lam)
        out["factorization"] = {
            "s1": args.delta * args.n * float(p.nu) + 2.0,
            "s2": lam**args.n + lam**-args.n,
            "exact_residual": exact_factor_residual(sc),
            "variant_lambda_2n": {
                "s2": lam ** (2 * args.n) + lam**-args.n,
                "exact_residual": exact_factor_residual(sc, printed=True),
                # the double-precision residual only means something inside the standard guard
                "float_residual": printed_factor_residual(sc) if args.n <= max_n(p.lam) else None,
                "note": "lambda**(2n) + lambda**-n does not factor the characteristic polynomial; "
                        "the second factor is lambda**n + lambda**-n",
            },
        }
    _emit(args, json.dumps(out) + "\n")
    return EXIT_OK


def _sweep_sources(args, seed):
    """List of (label, HomoclinicMatrix)."""
    chosen = sum(bool(x) for x in (args.special_case, args.pi, args.ensemble is not None))
    if chosen != 1:
        raise UsageError("choose exactly one of --special-case, --pi FILE, --ensemble COUNT")
    if args.special_case:
        if not args.delta_values:
            raise UsageError("--special-case needs --delta-values")
        return [(f"special:{d!r}", special_case_matrix(d)) for d in args.delta_values]
    if args.pi:
        if args.pi == "identity":
            return [("identity", HomoclinicMatrix.identity())]
        return [(f"file:{args.pi}", HomoclinicMatrix.from_file(args.pi))]
    return [(f"ensemble:{seed}:{i}", h) for i, h in enumerate(symplectic_ensemble(args.ensemble, seed=seed))]


def _sweep_cell(task):
    """Rows of one (lambda, nu, Pi) cell; runs in a worker process."""
    lam, nu, label, pi, ns, mode, tol = task
    h = HomoclinicMatrix(pi)
    p = LinearModelParams(nu=nu, lam=lam)
    limit = max_n(lam, mode)
    tr = transversality_report(h)
    rows, n0 = [], None
    with using_tolerances(tol):
        for n in ns:
            if n < 1 or (limit is not None and n > limit):
                continue
            r = full_report(h, p, n, mode)
            if n0 is None and is_hyperbolic(r.classification):
                n0 = n
            rows.append((lam, nu, label, n, tr.delta, tr.d22, float(r.a_n), float(r.b_n), r.classification,
                         float(r.min_unit_circle_distance), n0))
    return rows


def _format_rows(rows, fmt):
    if fmt == "json":
        return json.dumps([dict(zip(SWEEP_COLUMNS, r)) for r in rows]) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow(["" if x is None else repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def cmd_sweep(args, cfg):
    for lam in args.lambda_values:
        if not 0 < lam < 1:
            raise UsageError(f"lambda values must lie in (0, 1), got {lam!r}")
    sources = _sweep_sources(args, cfg.seed)
    tasks = [(lam, nu, label, h.pi, args.n_range, cfg.precision_mode, cfg.tolerances)
             for lam in args.lambda_values for nu in args.nu_values for label, h in sources]
    jobs = min(_jobs(args), max(1, len(tasks)))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            cells = list(ex.map(_sweep_cell, tasks))
    else:
        cells = [_sweep_cell(t) for t in tasks]
    rows = [r for cell in cells for r in cell]
    _emit(args, _format_rows(rows, getattr(args, "format", None) or "csv"))
    return EXIT_OK


def cmd_asymptotics(args, cfg):
    h = _matrix(args, cfg.precision_mode)
    ns = args.n_list if args.n_list is not None else args.n_range
    table = asymptotic_table(h, _params(args), ns, cfg.precision_mode)
    if (getattr(args, "format", None) or "csv") == "json":
        rows = [dict(r.__dict__) for r in table.rows]
        _emit(args, json.dumps({"rows": rows, "x1_sign": table.x1_sign}) + "\n")
    else:
        _emit(args, table.to_csv())
    return EXIT_OK


def _window(args):
    if len(args.p_plus) != 2:
        raise UsageError("--p-plus takes PHI,S")
    phi_p, s_p = args.p_plus
    if args.p_minus is None:
        p_minus = Vec4(wrap_angle(phi_p + args.return_time * args.omega), 0.0, 0.0, 1.0)
    elif len(args.p_minus) == 2:
        p_minus = Vec4(args.p_minus[0], 0.0, 0.0, args.p_minus[1])
    else:
        raise UsageError("--p-minus takes PHI,U")
    return WindowConfig(Vec4(phi_p, s_p, 0.0, 0.0), p_minus, args.radius, args.mu)


def _simulate_seed(task):
    h_pi, w, p, k, seed, start, tol = task
    h = HomoclinicMatrix(h_pi)
    with using_tolerances(tol):
        if start is not None:
            c = np.asarray(start, dtype=float)
        elif k == 0:
            c = np.zeros(4)
        else:
            c, _ = search_itinerary(h, w, p, k, seed=seed)
        records = itinerary(h, w, p, c, k)
        growth, _ = measured_expansion(h, w, p, c, k)
    return c, records, growth


def cmd_simulate(args, cfg):
    h = _matrix(args, cfg.precision_mode)
    p = _params(args)
    w = _window(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rotation_warning(p)
    for m in caught:
        _diag(f"warning: {m.message}")
    if args.start is not None and len(args.start) != 4:
        raise UsageError("--start takes four window coordinates")
    seeds = args.seeds if args.seeds else [cfg.seed]
    tasks = [(h.pi, w, p, args.k, s, args.start, cfg.tolerances) for s in seeds]
    jobs = min(_jobs(args), len(tasks))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_simulate_seed, tasks))
    else:
        results = [_simulate_seed(t) for t in tasks]

    lines = []
    best = None
    for seed, (c, records, growth) in zip(seeds, results):
        lines.append(json.dumps({
            "seed": seed,
            "start": [float(x) for x in c],
            "length": len(records),
            "returns": [r.n for r in records],
            "itinerary": [r.to_dict() for r in records],
            "measured_expansion": growth,
        }))
        if best is None or len(records) > len(best[1]):
            best = (c, records, growth)
    summary = {"max_length": len(best[1]) if best else 0, "measured_expansion": best[2] if best else None}
    if best and best[1] and len({r.n for r in best[1]}) == 1:
        r = full_report(h, p, best[1][0].n, cfg.precision_mode)
        summary["return_time"] = best[1][0].n
        summary["dominant_eigenvalue_modulus"] = max(abs(complex(z)) for z in r.eigenvalues)
        summary["classification"] = r.classification
    lines.append(json.dumps({"summary": summary}))
    _emit(args, "\n".join(lines) + "\n")
    if args.orbit_csv and best:
        write_atomic(args.orbit_csv, orbit_csv(p, best[1]))
    return EXIT_OK


def cmd_verify(args, cfg):
    from .verify import SUITES, run_suites

    if args.list:
        print("\n".join(SUITES))
        return EXIT_OK
    try:
        results = run_suites(args.suite, cfg.tolerances, jobs=min(_jobs(args), len(args.suite or SUITES)))
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        line = f"{status} {r.name} ({r.passed}/{r.total} checks)"
        if r.error:
            line += f" error: {r.error}"
        print(line)
    failed = [r.name for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed")
    if failed:
        _diag(f"failing suites: {', '.join(failed)}")
        return EXIT_VERIFY
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "asymptotics": cmd_asymptotics,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        # verify takes tolerances as given so that faults can be injected
        cfg = _run_config(args, validate=args.command != "verify")
        return COMMANDS[args.command](args, cfg)
    except (NotStronglyTransverse, NotWithTorsion) as exc:
        _diag(f"error: {exc}")
        return EXIT_GATE
    except NotYetHyperbolic as exc:
        _diag(f"error: {exc}")
        return EXIT_NOT_HYPERBOLIC
    except (OracleMismatch, NotPalindromic) as exc:
        _diag(f"oracle mismatch: {exc}")
        return EXIT_ORACLE
    except ConditioningExceeded as exc:
        _diag(f"error: {exc}")
        return EXIT_CONDITIONING
    except (UsageError, NonSymplectic, ValueError) as exc:
        _diag(f"usage error: {exc}")
        return EXIT_USAGE
    except OSError as exc:
        _diag(f"I/O error: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
