"""Command-line front end.

    schrqlsp solve --matrix A.mtx --rhs b.txt [--T 15 --R 15 --np 9] --out report.json
    schrqlsp demo ns3x3|poisson1d|poisson2d|poisson2d-bpx [--out table.csv --figures]
    schrqlsp sweep --T 5,10,15 --np 9 --Q 8 [--problem ns3x3|random] --out sweep.csv
    schrqlsp estimate --kappa 10 --normA 1 --xi 1 --eps 1e-2
    schrqlsp export ns3x3|poisson1d|poisson2d|poisson2d-bpx --out DIR

Exit codes: 0 success, 1 numerical failure, 2 input error. Errors are
reported on stderr as a JSON object.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import demos, lcu, mmio, solver
from .errors import InputError, NumericalError, SchrqlspError
from .evolution import HermitianProblem
from .kernels import KernelVariant

KERNELS = [v.value for v in KernelVariant]
OVERRIDE_KEYS = {"T": "T", "R": "R", "L": "L", "np": "n_p", "Q": "Q", "tau": "tau"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _add_params(p, lists=False):
    num = str if lists else float
    p.add_argument("--delta", type=num, default=None, help="target accuracy (default 1e-6)")
    p.add_argument("--kernel", choices=KERNELS, default=None)
    p.add_argument("--T", type=num, default=None, help="evolution time")
    p.add_argument("--R", type=float, default=None, help="p-domain half-width / pi (or right end with --L)")
    p.add_argument("--L", type=float, default=None, help="left end -L of an asymmetric p-domain")
    p.add_argument("--np", type=str if lists else int, default=None, help="log2 of the p-grid size")
    p.add_argument("--Q", type=str if lists else int, default=None, help="Gauss nodes per step")
    p.add_argument("--tau", type=float, default=None, help="time step")
    p.add_argument("--exact-integral", action="store_true", help="integrate in t exactly")
    p.add_argument("--no-strict", action="store_true", help="warn instead of failing on parameter invariants")


def _add_common(p):
    p.add_argument("--out", type=str, default=None, help="output file (default: stdout)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", type=str, default=None, help="JSON file whose keys override flags")
    p.add_argument("--no-timings", action="store_true", help="omit wall-clock fields for byte-stable output")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="schrqlsp", description="Schroedingerization-form linear solver emulator")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve A x = b from Matrix Market input")
    p.add_argument("--matrix", required=False)
    p.add_argument("--rhs", required=False)
    p.add_argument("--dilate", choices=["auto", "yes", "no"], default="auto")
    _add_params(p)
    _add_common(p)

    p = sub.add_parser("demo", help="reproduce a reference experiment as CSV")
    p.add_argument("name", choices=sorted(demos.DEMOS))
    p.add_argument("--figures", action="store_true", help="also write a PNG next to the CSV")
    _add_params(p)
    _add_common(p)

    p = sub.add_parser("sweep", help="Cartesian parameter sweep (comma-separated lists)")
    p.add_argument("--problem", choices=["ns3x3", "random"], default="ns3x3")
    p.add_argument("--matrix")
    p.add_argument("--rhs")
    p.add_argument("--size", type=_positive_int, default=4, help="dimension of the random Hermitian problem")
    p.add_argument("--figures", action="store_true")
    _add_params(p, lists=True)
    _add_common(p)

    p = sub.add_parser("estimate", help="query-complexity figures")
    p.add_argument("--kappa", type=float)
    p.add_argument("--normA", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--r", type=float, default=2.0)
    p.add_argument("--matrix")
    p.add_argument("--rhs")
    _add_common(p)

    p = sub.add_parser("export", help="write a reference system as Matrix Market fixtures")
    p.add_argument("name", choices=sorted(demos.DEMOS))
    p.add_argument("--level", type=_positive_int, default=2, help="mesh level (1 = coarsest) or FD intervals / 5")
    p.add_argument("--out", required=False, default=".")
    p.add_argument("--config", type=str, default=None)
    return ap


# --- helpers -----------------------------------------------------------------

def _apply_config(args):
    if not getattr(args, "config", None):
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except OSError as exc:
        raise InputError(f"{args.config}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.config}: {exc.msg}", line=exc.lineno) from None
    if not isinstance(cfg, dict):
        raise InputError(f"{args.config}: top level must be an object")
    for key, val in cfg.items():
        dest = key.replace("-", "_")
        if dest == "n_p":
            dest = "np"
        if not hasattr(args, dest) or dest in {"command", "config"}:
            raise InputError(f"{args.config}: unknown key {key!r}")
        setattr(args, dest, val)
    return args


def _overrides(args) -> dict:
    return {dst: getattr(args, src) for src, dst in OVERRIDE_KEYS.items() if getattr(args, src, None) is not None}


def _delta(args) -> float:
    d = 1e-6 if args.delta is None else float(args.delta)
    if not 0.0 < d < 1.0:
        raise InputError("--delta must lie in (0, 1)")
    return d


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _figure(args, rows, title):
    if not args.figures:
        return
    if not args.out:
        raise InputError("--figures needs --out")
    from . import plotting

    plotting.convergence_figure(rows, Path(args.out).with_suffix(".png"), title=title)


def _load_system(matrix, rhs):
    if not matrix or not rhs:
        raise InputError("--matrix and --rhs are required")
    A = mmio.read_matrix(matrix)
    b = mmio.read_vector(rhs)
    if A.shape[0] != A.shape[1]:
        raise InputError(f"matrix must be square, got {A.shape}")
    if b.shape[0] != A.shape[0]:
        raise InputError(f"right-hand side has length {b.shape[0]}, expected {A.shape[0]}")
    if not np.any(b):
        raise InputError("right-hand side must be nonzero")
    return A, b


# --- commands ----------------------------------------------------------------

def cmd_solve(args) -> int:
    A, b = _load_system(args.matrix, args.rhs)
    dil = {"auto": None, "yes": True, "no": False}[args.dilate]
    rep = solver.solve(
        A, b, _delta(args), kernel=args.kernel or "fourier-odd", overrides=_overrides(args),
        exact_integral=bool(args.exact_integral), dilate=dil, strict=not args.no_strict,
    )
    _emit(_json(rep.to_dict(timings=not args.no_timings)), args.out)
    return 0


def cmd_demo(args) -> int:
    name = args.name
    ov = _overrides(args)
    if name == "ns3x3":
        times = (ov.pop("T"),) if "T" in ov else (10.0, 15.0)
        rows = demos.ns3x3(times, overrides=ov, exact_integral=bool(args.exact_integral), delta=_delta(args))
    elif name == "poisson1d":
        rows = demos.poisson1d(delta=1e-8 if args.delta is None else _delta(args), overrides=ov or None)
    elif name == "poisson2d":
        rows = demos.poisson2d(overrides=ov, delta=_delta(args))
    else:
        rows = demos.poisson2d_bpx(T=ov.get("T"), n_p=ov.get("n_p"),
                                   eps=None if args.delta is None else _delta(args))
    if args.no_timings:
        for r in rows:
            r["runtime_ms"] = None
    _emit(_csv(rows, demos.COLUMNS), args.out)
    _figure(args, rows, name)
    return 0


def _parse_list(text, conv, name):
    if text is None:
        return [None]
    items = [t for t in str(text).split(",") if t.strip()]
    if not items:
        raise InputError(f"--{name}: empty grid")
    try:
        return [conv(t) for t in items]
    except ValueError:
        raise InputError(f"--{name}: cannot parse {text!r}") from None


def _random_hermitian(n, seed, kappa=10.0):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    mags = np.geomspace(1.0, kappa, n) / kappa * 2.0
    signs = rng.choice([-1.0, 1.0], size=n)
    A = (Q * (signs * mags)) @ Q.conj().T
    A = 0.5 * (A + A.conj().T)
    b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return A, b


def cmd_sweep(args) -> int:
    if args.matrix or args.rhs:
        A, b = _load_system(args.matrix, args.rhs)
    elif args.problem == "random":
        A, b = _random_hermitian(args.size, args.seed)
    else:
        A, b = demos.NS3X3_A, demos.NS3X3_B
    Ts = _parse_list(args.T, float, "T")
    nps = _parse_list(args.np, int, "np")
    Qs = _parse_list(args.Q, int, "Q")
    deltas = _parse_list(args.delta, float, "delta") if args.delta is not None else [1e-6]
    problem = solver._as_problem(A, b, None)
    exact = np.linalg.solve(A, b)
    rows = []
    for T, n_p, Q, d in itertools.product(Ts, nps, Qs, deltas):
        ov = {"T": T, "n_p": n_p, "Q": Q, "R": args.R, "L": args.L, "tau": args.tau}
        t0 = time.perf_counter()
        rep = solver.solve(problem, None, d, kernel=args.kernel or "fourier-odd", overrides=ov,
                           exact_integral=bool(args.exact_integral), strict=False, compute_lcu=False)
        ms = 1e3 * (time.perf_counter() - t0)
        p = rep.params
        rows.append({
            "T": p.T, "n_p": p.n_p, "Q": p.Q, "delta": d,
            "error": float(np.linalg.norm(rep.x - exact)),
            "oracle_gap": rep.oracle_gap, "residual": rep.residual,
            "runtime_ms": None if args.no_timings else ms,
        })
    cols = ("T", "n_p", "Q", "delta", "error", "oracle_gap", "residual", "runtime_ms")
    _emit(_csv(rows, cols), args.out)
    if args.figures:
        fig_rows = [{"level_or_T": r["T"], "l2_error": r["error"], "residual": r["residual"]} for r in rows]
        _figure(args, fig_rows, "sweep")
    return 0


def cmd_estimate(args) -> int:
    eps = args.eps
    if args.matrix:
        if not args.rhs:
            raise InputError("--rhs is required with --matrix to compute xi")
        A, b = _load_system(args.matrix, args.rhs)
        prob = solver._as_problem(A, b, None)
        kappa, normA = prob.kappa, prob.norm
        x = np.linalg.solve(A, b)
        xi = float(np.linalg.norm(x) / np.linalg.norm(b))
    else:
        missing = [n for n in ("kappa", "normA", "xi") if getattr(args, n) is None]
        if missing:
            raise InputError("missing spectral data: " + ", ".join("--" + m for m in missing))
        kappa, normA, xi = args.kappa, args.normA, args.xi
    if eps is None:
        eps = 1e-3
    try:
        q = lcu.query_complexity(kappa, normA, xi, eps, r=args.r)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    out = {"kappa": kappa, "normA": normA, "xi": xi, "eps": eps, "r": args.r, **q._asdict()}
    _emit(_json(out), args.out)
    return 0


def cmd_export(args) -> int:
    from .problems import (
        bpx,
        build_hierarchy,
        poisson1d_manufactured,
        poisson2d_manufactured,
        preconditioned_problem,
    )

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = args.name
    if name == "ns3x3":
        mmio.write_matrix(out / "A.mtx", demos.NS3X3_A)
        mmio.write_vector(out / "b.txt", demos.NS3X3_B)
        mmio.write_vector(out / "x.txt", demos.NS3X3_X)
    elif name == "poisson1d":
        sys_ = poisson1d_manufactured(5 * args.level)
        mmio.write_matrix(out / "A.mtx", sys_.A)
        mmio.write_vector(out / "b.txt", sys_.b)
    else:
        hier = build_hierarchy(args.level - 1)
        sys_ = poisson2d_manufactured(hier, args.level - 1)
        mesh = sys_.meta["mesh"]
        np.savetxt(out / "vertices.csv", mesh.vertices, delimiter=",", header="x,y", comments="", fmt="%.17g")
        np.savetxt(out / "triangles.csv", mesh.triangles, delimiter=",", header="v0,v1,v2", comments="", fmt="%d")
        mmio.write_matrix(out / "A.mtx", sys_.A)
        mmio.write_vector(out / "b.txt", sys_.b)
        if name == "poisson2d-bpx":
            B = bpx(hier)
            pre = preconditioned_problem(sys_, B)
            mmio.write_matrix(out / "B.mtx", B)
            mmio.write_matrix(out / "W.mtx", pre.W)
            mmio.write_vector(out / "c.txt", pre.c)
    return 0


COMMANDS = {"solve": cmd_solve, "demo": cmd_demo, "sweep": cmd_sweep, "estimate": cmd_estimate, "export": cmd_export}


def _error(exc, code) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    line = getattr(exc, "line", None)
    if line is not None:
        payload["line"] = line
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args = _apply_config(args)
        return COMMANDS[args.command](args)
    except InputError as exc:
        return _error(exc, 2)
    except NumericalError as exc:
        return _error(exc, 1)
    except (ValueError, TypeError) as exc:
        return _error(exc, 2)
    except SchrqlspError as exc:
        return _error(exc, 1)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    raise SystemExit(main())
