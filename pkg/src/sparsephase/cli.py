"""Command-line front end: ``sparsephase <command> ...``.

Exit codes: 0 success, 1 usage error, 2 domain or numerical error,
3 I/O error. Every output carries the command name, package version, the
full parameter echo and a SHA-256 of the payload.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import sys
import warnings

import numpy as np

from . import __version__
from .errors import DimensionError, SparsePhaseError
from .experiment import success_grid
from .factors import (
    AlgorithmId,
    AsymptoticBoundsProvider,
    FiniteBoundsProvider,
    FixedBoundsProvider,
    factors_for,
    iht_factors,
    max_iterations,
    romp_factor,
    romp_threshold,
)
from .rip_asymptotic import PhasePoint, bound_L, bound_U
from .rip_finite import estimate_arip_lower, exact_arip
from .solvers import RecoveryOptions, solve
from .transition import CURVE_ALGORITHMS, stability_level_curve, transition_curve

EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# text formats


def read_matrix(path) -> np.ndarray:
    """Read ``rows cols`` followed by rows*cols row-major numbers."""
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise OSError(f"{path}: missing 'rows cols' header")
    try:
        rows, cols = int(tokens[0]), int(tokens[1])
        values = np.array([float(t) for t in tokens[2:]])
    except ValueError as exc:
        raise OSError(f"{path}: unparsable entry ({exc})") from None
    if values.size != rows * cols:
        raise OSError(f"{path}: header says {rows}x{cols} but found {values.size} values")
    return values.reshape(rows, cols)


def read_vector(path) -> np.ndarray:
    m = read_matrix(path)
    if 1 not in m.shape:
        raise DimensionError(f"{path}: expected a vector, got shape {m.shape}")
    return m.ravel()


def write_matrix(path, M):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]}\n")
        for row in M:
            fh.write(" ".join(fmt(v) for v in row) + "\n")


def fmt(value) -> str:
    """The single number formatter shared by CSV and JSON output."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else fmt(v)
    if hasattr(value, "value"):
        return value.value
    return value


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def envelope_json(command, params, payload) -> str:
    payload = _jsonable(payload)
    doc = {
        "command": command,
        "version": __version__,
        "params": _jsonable(params),
        "payload": payload,
        "sha256": hashlib.sha256(_canonical(payload).encode()).hexdigest(),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def envelope_csv(command, params, body) -> str:
    digest = hashlib.sha256(body.encode()).hexdigest()
    head = (f"# sparsephase {__version__} {command}\n"
            f"# params: {_canonical(_jsonable(params))}\n"
            f"# sha256: {digest}\n")
    return head + body


def _emit(args, text, path=None):
    path = path or args.out
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _params(args):
    skip = {"func", "out", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _table_out(args, command, header, rows, json_payload=None):
    rows = list(rows)
    if args.format == "json":
        payload = json_payload if json_payload is not None else [
            dict(zip(header, r)) for r in rows]
        _emit(args, envelope_json(command, _params(args), payload))
    else:
        _emit(args, envelope_csv(command, _params(args), csv_text(header, rows)))


def _grid(values, grid, log=False):
    if grid is not None:
        start, stop, num = grid
        num = int(num)
        if num < 1:
            raise UsageError("grid size must be positive")
        return list(np.geomspace(start, stop, num) if log else np.linspace(start, stop, num))
    return list(values)


# ---------------------------------------------------------------------------
# commands


def cmd_bounds(args):
    deltas = _grid(args.delta or [], args.delta_grid, args.log)
    rhos = _grid(args.rho or [], args.rho_grid, args.log)
    if not deltas or not rhos:
        raise UsageError("give --delta/--delta-grid and --rho/--rho-grid")
    rows = []
    for d in deltas:
        for r in rhos:
            at = PhasePoint(float(d), float(r))
            rows.append((at.delta, at.rho, bound_L(at), bound_U(at)))
    _table_out(args, "bounds", ("delta", "rho", "L", "U"), rows)


def cmd_transition(args):
    if args.delta or args.delta_grid:
        deltas = _grid(args.delta or [], args.delta_grid, args.log)
    else:
        deltas = list(np.geomspace(1e-3, 1.0, 50))
    deltas = sorted(float(d) for d in deltas)
    tables = []
    for alg in args.alg:
        if args.stability is not None:
            tables.append(stability_level_curve(alg, deltas, args.stability))
        else:
            tables.append(transition_curve(alg, deltas, args.target))
    header = ("delta", "rho_star", "oversampling", "residual")
    params = _params(args)
    if args.out_dir:
        import os

        os.makedirs(args.out_dir, exist_ok=True)
        for t in tables:
            body = csv_text(header, t.rows())
            _emit(args, envelope_csv("transition", dict(params, alg=[t.algorithm.value]), body),
                  os.path.join(args.out_dir, f"{t.algorithm.value}.csv"))
        _emit(args, envelope_json("transition", params, [t.to_dict() for t in tables]),
              os.path.join(args.out_dir, "transition.json"))
    elif args.format == "json":
        _emit(args, envelope_json("transition", params, [t.to_dict() for t in tables]))
    else:
        chunks = []
        for t in tables:
            chunks.append(f"# algorithm: {t.algorithm.value}\n" + csv_text(header, t.rows()))
        _emit(args, envelope_csv("transition", params, "".join(chunks)))
    failed = [(t.algorithm.value, p.delta, p.error) for t in tables for p in t.points if p.error]
    for alg, d, err in failed:
        print(f"warning: {alg} at delta={d}: {err}", file=sys.stderr)


def _provider(args):
    if args.uniform_bounds is not None:
        return FixedBoundsProvider(uniform=tuple(args.uniform_bounds))
    if args.matrix is not None:
        if args.k is None:
            raise UsageError("--matrix needs --k")
        A = read_matrix(args.matrix)
        return FiniteBoundsProvider(A, args.k, args.bounds, args.trials, args.seed)
    if args.delta is not None and args.rho is not None:
        return AsymptoticBoundsProvider(args.delta, args.rho, inflation=args.epsilon)
    return None


def cmd_factors(args):
    b = _provider(args)
    alg = AlgorithmId(args.alg)
    if alg is AlgorithmId.ROMP:
        n = args.n
        if n is None and args.matrix is not None:
            n = read_matrix(args.matrix).shape[0]
        if n is None:
            raise UsageError("romp needs --n (or --matrix)")
        if b is None:
            row = {"algorithm": "romp", "n": n, "mu_r": None,
                   "threshold": romp_threshold(n), "satisfied": None}
        else:
            mu_r, thr, ok = romp_factor(b, n)
            row = {"algorithm": "romp", "n": n, "mu_r": mu_r, "threshold": thr,
                   "satisfied": ok}
    else:
        if b is None:
            raise UsageError("give --delta/--rho, --matrix/--k, or --uniform-bounds")
        if alg is AlgorithmId.IHT and args.omega is not None:
            f = iht_factors(b, omega=args.omega)
        else:
            f = factors_for(alg, b)
        stab = f.stability
        row = {
            "algorithm": alg.value,
            "mu": f.mu,
            "xi": f.xi,
            "kappa": f.kappa,
            "omega_star": f.omega_star,
            "stability": "undefined" if stab is None else stab,
        }
        if args.nu is not None:
            row["max_iterations"] = (max_iterations(f, args.nu) if f.mu < 1.0
                                     else "undefined")
    header = tuple(row)
    _table_out(args, "factors", header, [tuple(row.values())], json_payload=row)


def cmd_recover(args):
    A = read_matrix(args.matrix)
    y = read_vector(args.y)
    if y.size != A.shape[0]:
        raise DimensionError(f"dimension mismatch: A is {A.shape[0]}x{A.shape[1]} "
                             f"but y has length {y.size}")
    opts = RecoveryOptions(
        max_iterations=args.max_iterations,
        residual_tolerance=args.residual_tolerance,
        stall_factor=args.stall_factor,
        omega=args.omega,
        debias=not args.no_debias,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = solve(args.alg, A, y, args.k, opts)
    payload = result.to_dict()
    if args.format == "json":
        _emit(args, envelope_json("recover", _params(args), payload))
    else:
        rows = [(int(i), result.estimate[i]) for i in result.support]
        _emit(args, envelope_csv("recover", _params(args), csv_text(("index", "value"), rows)))


def cmd_experiment(args):
    deltas = _grid(args.delta or [], args.delta_grid, args.log)
    rhos = _grid(args.rho or [], args.rho_grid, args.log)
    if not deltas or not rhos:
        raise UsageError("give --delta/--delta-grid and --rho/--rho-grid")
    opts = RecoveryOptions(omega=args.omega)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        grid = success_grid(args.alg, deltas, rhos, args.n, args.trials, args.seed, opts,
                            signal_kind=args.signal, noise_level=args.noise,
                            tolerance=args.tolerance)
    _table_out(args, "experiment", grid.CSV_HEADER, grid.rows(), json_payload=grid.to_dict())
    for c in grid.skipped:
        print(f"skipped cell delta={c.delta} rho={c.rho}: need 1 <= k < n < N",
              file=sys.stderr)


def cmd_rip(args):
    A = read_matrix(args.matrix)
    if args.mode == "exact":
        b = exact_arip(A, args.order)
    else:
        b = estimate_arip_lower(A, args.order, args.trials, args.seed)
    row = {"L": b.L, "U": b.U, "order": b.order, "provenance": b.provenance.value}
    _table_out(args, "rip", tuple(row), [tuple(row.values())], json_payload=row)


# ---------------------------------------------------------------------------
# parser


def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write to this path instead of stdout")


def _add_grid(p, name, single_type=float):
    p.add_argument(f"--{name}", type=single_type, nargs="+", help=f"explicit {name} values")
    p.add_argument(f"--{name}-grid", type=float, nargs=3, metavar=("START", "STOP", "NUM"),
                   help=f"evenly spaced {name} values")


def build_parser():
    parser = _Parser(prog="sparsephase", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds", help="asymptotic Gaussian aRIP bounds L, U")
    _add_grid(p, "delta")
    _add_grid(p, "rho")
    p.add_argument("--log", action="store_true", help="log-space the grids")
    _add_output(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("transition", help="phase-transition curves rho_S(delta)")
    p.add_argument("--alg", nargs="+", choices=[a.value for a in CURVE_ALGORITHMS],
                   default=[a.value for a in CURVE_ALGORITHMS])
    _add_grid(p, "delta")
    p.add_argument("--log", action="store_true", help="log-space the delta grid")
    p.add_argument("--target", type=float, default=1.0, help="mu level (default 1)")
    p.add_argument("--stability", type=float, default=None,
                   help="trace xi/(1-mu) = LEVEL instead of a mu level")
    p.add_argument("--out-dir", help="write <alg>.csv files and transition.json here")
    _add_output(p)
    p.set_defaults(func=cmd_transition)

    p = sub.add_parser("factors", help="convergence/stability factors")
    p.add_argument("--alg", required=True, choices=[a.value for a in AlgorithmId])
    p.add_argument("--delta", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--epsilon", type=float, default=0.0,
                   help="evaluate at (1+epsilon)*rho")
    p.add_argument("--matrix", help="matrix file for finite aRIP constants")
    p.add_argument("--k", type=int)
    p.add_argument("--bounds", choices=("exact", "estimate"), default="exact")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--uniform-bounds", type=float, nargs=2, metavar=("L", "U"))
    p.add_argument("--n", type=int, help="measurement count (ROMP threshold)")
    p.add_argument("--omega", type=float, help="IHT step (default: balancing step)")
    p.add_argument("--nu", type=float, help="nu_min, to print the iteration cap")
    _add_output(p)
    p.set_defaults(func=cmd_factors)

    p = sub.add_parser("recover", help="run a greedy solver on files")
    p.add_argument("--matrix", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alg", choices=("cosamp", "sp", "iht"), default="cosamp")
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--residual-tolerance", type=float)
    p.add_argument("--stall-factor", type=float, default=0.999)
    p.add_argument("--omega", type=float, default=0.65)
    p.add_argument("--no-debias", action="store_true")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("experiment", help="empirical success-rate grid")
    p.add_argument("--alg", choices=("cosamp", "sp", "iht"), default="cosamp")
    _add_grid(p, "delta")
    _add_grid(p, "rho")
    p.add_argument("--log", action="store_true")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--signal", choices=("sign", "gaussian"), default="sign")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--omega", type=float, default=0.65)
    _add_output(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("rip", help="aRIP constants of a matrix file")
    p.add_argument("mode", choices=("exact", "estimate"))
    p.add_argument("--matrix", required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)
    p.set_defaults(func=cmd_rip)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"sparsephase: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SparsePhaseError, ValueError, ArithmeticError) as exc:
        print(f"sparsephase: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"sparsephase: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
