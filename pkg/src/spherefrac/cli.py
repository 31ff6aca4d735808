"""Command-line front end.

    spherefrac kernel --kernel Kpos --n 3 --s 0.5 --d-min 1e-2 --d-max 1
    spherefrac apply --input coeffs.json --s 0.5 --route kernel
    spherefrac verify --suite minak
    spherefrac extend --input random:6 --s 0.3
    spherefrac circle --s 1.5

Exit codes: 0 ok, 1 verification failure, 2 validation error, 3 numeric
tolerance failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import __version__, circle, extension, fracops, semigroups, verify
from .errors import DomainError, ToleranceError
from .quadrature import QuadratureSpec
from .zonal import SphereDim, ZonalCoeffs

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_VALIDATION = 2
EXIT_TOLERANCE = 3

KERNEL_LABELS = ("Kpos", "Kneg-zeta", "Kneg-heat", "L2s", "Ss", "Heat", "Poisson")
COMMANDS = ("kernel", "apply", "verify", "extend", "circle")


class UsageError(Exception):
    """Invalid command line; reported with exit code 2."""


def _fmt(x) -> str:
    return format(float(x), ".17g")


def thread_count() -> int:
    """Worker threads, capped by ``SPHEREFRAC_THREADS`` (default: CPU count, at most 4)."""
    raw = os.environ.get("SPHEREFRAC_THREADS")
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise UsageError(f"SPHEREFRAC_THREADS must be an integer, got {raw!r}") from None
        return max(1, n)
    return max(1, min(4, os.cpu_count() or 1))


ROW_CHUNK = 8


def parallel_rows(fn: Callable[[np.ndarray], np.ndarray], grid: np.ndarray, threads: int) -> np.ndarray:
    """Evaluate ``fn`` on fixed chunks of ``grid`` and return results in grid order.

    Chunk boundaries do not depend on ``threads``; adaptive quadrature
    over a batch stops at a level set by the whole batch, so this keeps
    the output byte-identical for any thread count.
    """
    chunks = [grid[i : i + ROW_CHUNK] for i in range(0, grid.size, ROW_CHUNK)]
    if threads <= 1 or len(chunks) == 1:
        parts = [fn(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(fn, chunks))
    return np.concatenate([np.asarray(p, dtype=float).reshape(-1) for p in parts])


def _header(args, extra: dict) -> List[str]:
    echo = {"command": args.command, "version": __version__}
    echo.update(extra)
    return ["# " + " ".join(f"{k}={v}" for k, v in echo.items())]


def _csv(header: List[str], columns: Sequence[str], rows) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(line + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(text: str, path: Optional[str]) -> None:
    if path and path != "-":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _spec(args) -> QuadratureSpec:
    return fracops.KERNEL_SPEC.scaled(args.tol)


def load_coeffs(source: str, n: int, seed: int, mean_zero: bool = False) -> ZonalCoeffs:
    """Read coefficients from a JSON file, ``-`` (stdin) or ``random:K``."""
    if source.startswith("random:"):
        try:
            K = int(source.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad random input spec {source!r}; use random:K") from None
        if K < 0:
            raise UsageError("random:K needs K >= 0")
        return verify.random_coeffs(SphereDim(n), K, seed, mean_zero=mean_zero)
    try:
        text = sys.stdin.read() if source == "-" else open(source, encoding="utf-8").read()
        obj = json.loads(text)
    except OSError as exc:
        raise UsageError(f"cannot read {source}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{source} is not valid JSON: {exc}") from None
    return ZonalCoeffs.from_json(obj)


# ----------------------------------------------------------------------
# commands


def _kernel_profile(args):
    dim = SphereDim(args.n)
    spec = _spec(args)
    label = args.kernel
    if label == "Kpos":
        return fracops.profile_Ks(dim, args.s, spec), {"s": args.s, "route": "heat"}
    if label == "Kneg-zeta":
        return fracops.profile_Kneg(dim, args.s, "zeta", spec), {"s": args.s, "route": "poisson-bessel"}
    if label == "Kneg-heat":
        return fracops.profile_Kneg(dim, args.s, "heat", spec), {"s": args.s, "route": "heat"}
    if label == "L2s":
        return fracops.profile_L2s(dim, args.s, spec), {"s": args.s, "route": "poisson"}
    if label == "Ss":
        return fracops.profile_Ss(dim, args.s, spec), {"s": args.s, "route": "poisson-bessel"}
    if label == "Heat":
        return semigroups.heat_profile(dim, args.t), {"t": args.t, "route": "series"}
    if label == "Poisson":
        return semigroups.poisson_profile(dim, args.r), {"r": args.r, "route": "closed-form"}
    raise UsageError(f"unknown kernel {label!r}; choose from {', '.join(KERNEL_LABELS)}")


def cmd_kernel(args) -> int:
    if args.kernel is None:
        raise UsageError("kernel needs --kernel")
    prof, echo = _kernel_profile(args)
    if not (0.0 < args.d_min < args.d_max <= math.pi):
        raise UsageError("need 0 < d-min < d-max <= pi")
    d = np.geomspace(args.d_min, args.d_max, args.points)
    vals = parallel_rows(prof.at_distance, d, thread_count())
    tau = np.cos(d)
    head = _header(args, dict(kernel=args.kernel, n=args.n, **echo, d_min=args.d_min, d_max=args.d_max, points=args.points, tol=args.tol))
    if args.format == "json":
        text = _json_text({"header": head[0][2:], "d": d.tolist(), "tau": tau.tolist(), "value": vals.tolist()})
    else:
        text = _csv(head, ("d", "tau", "value"), zip(d, tau, vals))
    _emit(text, args.output)
    return EXIT_OK


def cmd_apply(args) -> int:
    negative = args.mode == "negative"
    c = load_coeffs(args.input, args.n, args.seed, mean_zero=negative)
    spec = fracops.APPLY_SPEC.scaled(args.tol)
    kspec = _spec(args)
    out = {"route": args.route, "mode": args.mode, "s": args.s, "n": c.dim.n, "input": args.input}
    if args.input.startswith("random:"):
        out["seed"] = args.seed
    if args.route == "spectral":
        if args.mode == "dtn":
            res = fracops.dtn_spectral(c, 2.0 * args.s)
            out["formula"] = "a_k (k + nu)^(2s)"
        else:
            res = fracops.spectral_frac(c, fracops.FracOrder(args.s, args.mode))
            out["formula"] = "a_k lambda_k^(-s)" if negative else "a_k lambda_k^s"
        out["pole_value"] = res.pole_value()
        out["coeffs"] = res.to_json()
    elif args.route == "kernel":
        if args.mode == "positive":
            val = fracops.apply_frac_at_pole(c, args.s, spec, kspec)
            out["formula"] = "subtracted K_s integral (heat subordination)"
        elif args.mode == "negative":
            val = fracops.apply_neg_at_pole(c, args.s, spec, "zeta", kspec)
            out["formula"] = "K_-s integral (Poisson-Bessel route)"
        else:
            val = fracops.apply_L2s_at_pole(c, 2.0 * args.s, spec, kspec)
            out["formula"] = "subtracted L_2s integral plus nu^(2s) u(e)"
        out["pole_value"] = float(val)
    else:
        raise UsageError(f"unknown route {args.route!r}")
    _emit(_json_text(out), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    keys = None
    if args.suite:
        keys = [k.strip() for part in args.suite for k in part.split(",") if k.strip()]
        bad = [k for k in keys if k not in verify.SUITES]
        if bad:
            raise UsageError(f"unknown suite(s) {', '.join(bad)}; choose from {', '.join(verify.SUITES)}")
    results = verify.run_suites(keys, tol_scale=args.tol, seed=args.seed)
    report = verify.report_json(results, tol_scale=args.tol, seed=args.seed, version=__version__)
    _emit(_json_text(report), args.output)
    for r in results:
        print(f"criterion {r.id} [{r.key}] {'PASS' if r.passed else 'FAIL'} ({r.elapsed:.1f} s)", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_extend(args) -> int:
    c = load_coeffs(args.input, args.n, args.seed)
    if not (0.0 < args.y_min < args.y_max):
        raise UsageError("need 0 < y-min < y-max")
    y = np.linspace(args.y_min, args.y_max, args.points)
    tau = np.linspace(-1.0, 1.0, args.tau_points)
    field = extension.extension_field(c, args.s, y)
    U = field.evaluate(tau)
    echo = dict(n=c.dim.n, s=args.s, input=args.input, y_min=args.y_min, y_max=args.y_max, points=args.points, tau_points=args.tau_points)
    if args.input.startswith("random:"):
        echo["seed"] = args.seed
    echo["route"] = "bessel-multiplier"
    head = _header(args, echo)
    if args.format == "json":
        obj = {
            "header": head[0][2:],
            "heights": y.tolist(),
            "multipliers": {str(k): field.mult[k].tolist() for k in range(c.K + 1)},
            "tau": tau.tolist(),
            "U": U.tolist(),
        }
        text = _json_text(obj)
    else:
        rows = ((t, yy, U[i, j]) for j, yy in enumerate(y) for i, t in enumerate(tau))
        text = _csv(head, ("tau", "y", "U"), rows)
    _emit(text, args.output)
    return EXIT_OK


def cmd_circle(args) -> int:
    if not (0.0 < args.x_min < args.x_max < 1.0):
        raise UsageError("need 0 < x-min < x-max < 1")
    x = np.linspace(args.x_min, args.x_max, args.points)
    if args.kind == "neg":
        fn = lambda xs: circle.circle_kernel_neg(circle.CircleKernelQuery(args.s, xs))
        formula = "[zeta(1-sigma,x)+zeta(1-sigma,1-x)]/(2 Gamma(sigma) cos(pi sigma/2))"
    else:
        fn = lambda xs: circle.circle_kernel_pos(circle.CircleKernelQuery(args.s, xs))
        formula = "[zeta(1+sigma,x)+zeta(1+sigma,1-x)]/(2 Gamma(-sigma) cos(pi sigma/2))"
    fn(x[:1])  # validate before spawning workers
    vals = parallel_rows(fn, x, thread_count())
    head = _header(args, dict(kind=args.kind, sigma=args.s, x_min=args.x_min, x_max=args.x_max, points=args.points, route="hurwitz"))
    if args.format == "json":
        text = _json_text({"header": head[0][2:], "formula": formula, "x": x.tolist(), "value": vals.tolist()})
    else:
        text = _csv(head, ("x", "value"), zip(x, vals))
    _emit(text, args.output)
    return EXIT_OK


HANDLERS = {"kernel": cmd_kernel, "apply": cmd_apply, "verify": cmd_verify, "extend": cmd_extend, "circle": cmd_circle}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spherefrac", description="Fractional powers of the Laplacian on spheres and the circle.")
    p.add_argument("command_pos", nargs="?", choices=COMMANDS, metavar="COMMAND", help="one of: " + ", ".join(COMMANDS))
    p.add_argument("--command", dest="command_flag", choices=COMMANDS, help="alternative to the positional COMMAND")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--n", type=int, default=3, help="sphere S^(n-1) in R^n (default 3)")
    p.add_argument("--s", type=float, default=0.5, help="fractional order s (sigma for circle)")
    p.add_argument("--kernel", choices=KERNEL_LABELS, help="kernel label for the kernel command")
    p.add_argument("--t", type=float, default=0.1, help="heat time for --kernel Heat")
    p.add_argument("--r", type=float, default=0.5, help="Poisson parameter for --kernel Poisson")
    p.add_argument("--d-min", type=float, default=1e-2)
    p.add_argument("--d-max", type=float, default=1.0)
    p.add_argument("--x-min", type=float, default=0.01)
    p.add_argument("--x-max", type=float, default=0.99)
    p.add_argument("--y-min", type=float, default=0.05)
    p.add_argument("--y-max", type=float, default=2.0)
    p.add_argument("--points", type=int, default=64, help="grid points (d, x or y)")
    p.add_argument("--tau-points", type=int, default=21, help="tau grid for extend")
    p.add_argument("--input", default="random:8", help="coefficient JSON file, '-' for stdin, or random:K")
    p.add_argument("--route", choices=("spectral", "kernel"), default="spectral", help="apply: formula route")
    p.add_argument("--mode", choices=("positive", "negative", "dtn"), default="positive", help="apply: operator")
    p.add_argument("--kind", choices=("neg", "pos"), default="neg", help="circle: K_-sigma or K_sigma")
    p.add_argument("--output", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None, help="csv (default) or json; verify always writes json")
    p.add_argument("--tol", type=float, default=1.0, help="tolerance scale factor relative to the defaults")
    p.add_argument("--seed", type=int, default=verify.DEFAULT_SEED, help="seed for random:K inputs")
    p.add_argument("--suite", action="append", help="verify: suite key(s), repeatable or comma separated")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else EXIT_OK
    cmd = args.command_pos or args.command_flag
    if args.command_pos and args.command_flag and args.command_pos != args.command_flag:
        print("error: conflicting commands", file=sys.stderr)
        return EXIT_VALIDATION
    if cmd is None:
        parser.print_usage(sys.stderr)
        print("error: a command is required", file=sys.stderr)
        return EXIT_VALIDATION
    args.command = cmd
    if args.format is None:
        args.format = "json" if cmd in ("verify", "apply") else "csv"
    try:
        if args.points < 2 or args.tau_points < 1:
            raise UsageError("--points must be at least 2")
        if not args.tol > 0:
            raise UsageError("--tol must be positive")
        return HANDLERS[cmd](args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ToleranceError as exc:
        print(f"tolerance not met: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
