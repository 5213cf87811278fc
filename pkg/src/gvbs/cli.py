"""Command-line front end.

Examples:
  gvbs build --modes 6 --x 2 --s 3 --bond epr --out ring.gvbs.json
  gvbs entangle --state ring.gvbs.json
  gvbs thresholds --N 6 --k 3 --x-min 1.2 --x-max 3 --steps 10 --out s3.csv
  gvbs sweep --config grid.json --out grid.csv
  gvbs verify --out report.json

Numeric outputs go to ``--out`` (stdout when omitted). Every run also writes a
JSON manifest next to the output, or to ``gvbs-<command>.manifest.json`` in the
working directory. Exit codes: 0 success, 2 invalid input, 1 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
import time
import traceback
from pathlib import Path

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .acceptance import run_all
from .building_block import StandardFormParams
from .config import DEFAULT_TOLERANCES, Tolerances
from .entanglement import (
    PartitionedState,
    eof_symmetric,
    log_negativity,
    pt_spectrum,
    s2_polynomial_root,
    threshold_curve,
)
from .errors import GvbsError, SymmetryError, ValidationError
from .phase_space import is_physical, purity
from .protocols import (
    MODES,
    CLASSICAL_FIDELITY,
    grid_from_config,
    optimal_fidelity,
    optimize_fidelity_numeric,
    teleport_fidelity,
)
from .valence_bond import (
    GvbsSpec,
    GvbsState,
    build_gvbs,
    cyclic_symmetry_error,
    parse_bond,
    ring_distance,
    two_mode_reduction,
)

COMMANDS = ("build", "reduce", "entangle", "thresholds", "fidelity", "sweep", "verify")
TOL_ALIASES = {f"tau_{k}": k for k in DEFAULT_TOLERANCES.as_dict()}


class Run:
    """Collects what the manifest needs while a command executes."""

    def __init__(self, args: argparse.Namespace, argv: list[str]):
        self.args = args
        self.argv = argv
        self.outputs: list[str] = []
        self.extra: dict = {}

    def emit(self, text: str, path: str | Path | None = None) -> None:
        """Write ``text`` to ``path`` (or ``--out``, or stdout) and record the file."""
        target = path if path is not None else self.args.out
        if target is None:
            sys.stdout.write(text)
            return
        target = Path(target)
        target.write_text(text, encoding="utf-8")
        self.outputs.append(str(target))

    def say(self, msg: str) -> None:
        if self.args.quiet:
            return
        # keep stdout clean when it carries the data
        stream = sys.stdout if self.args.out is not None else sys.stderr
        print(msg, file=stream)


def _json(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _tol_pair(text: str) -> tuple[str, float]:
    key, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    key = TOL_ALIASES.get(key.strip(), key.strip())
    if key not in DEFAULT_TOLERANCES.as_dict():
        raise argparse.ArgumentTypeError(f"unknown tolerance {key!r}; choose from {sorted(DEFAULT_TOLERANCES.as_dict())}")
    try:
        return key, float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {key} needs a number, got {val!r}") from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage, which already matches the
    # validation exit code; only the message prefix is customised
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"gvbs: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument(
        "--tol-override",
        action="append",
        type=_tol_pair,
        default=[],
        metavar="KEY=VAL",
        help="override a tolerance, e.g. phys=1e-8 (repeatable)",
    )
    common.add_argument("--quiet", action="store_true", help="suppress summaries")
    common.add_argument("--manifest", default=None, help="manifest path (default: <out>.manifest.json)")

    state_src = argparse.ArgumentParser(add_help=False)
    state_src.add_argument("--state", default=None, help="state file written by 'gvbs build'")
    state_src.add_argument("--modes", type=int, default=None, help="ring size N (when building inline)")
    state_src.add_argument("--x", type=float, default=None)
    state_src.add_argument("--s", type=float, default=None)
    state_src.add_argument("--bond", default="epr", help="'epr' or 'r=VALUE' (default: epr)")

    ap = _Parser(prog="gvbs", description="Gaussian valence bond states on harmonic rings.")
    ap.add_argument("--version", action="version", version=f"gvbs {__version__} ({BACKEND} kernels)")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("build", parents=[common, state_src], help="build a GVBS and write its state file")

    p = sub.add_parser("reduce", parents=[common, state_src], help="two-site reduced covariance matrix")
    p.add_argument("--sites", type=int, nargs=2, required=True, metavar=("I", "J"))

    p = sub.add_parser("entangle", parents=[common, state_src], help="entanglement between ring sites")
    p.add_argument("--sites", type=int, nargs=2, default=None, metavar=("I", "J"),
                   help="one pair; default is site 0 against every distance")

    p = sub.add_parser("thresholds", parents=[common], help="entanglement thresholds s_k(x) as CSV")
    p.add_argument("--N", dest="n_sites", type=int, required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--x-min", type=float, required=True)
    p.add_argument("--x-max", type=float, required=True)
    p.add_argument("--steps", type=_positive_int, required=True)
    p.add_argument("--bond", default="epr")

    p = sub.add_parser("fidelity", parents=[common, state_src], help="telecloning fidelity between two sites")
    p.add_argument("--sites", type=int, nargs=2, default=(0, 1), metavar=("SENDER", "RECEIVER"))
    p.add_argument("--numeric", action="store_true", help="also run the numeric local optimisation")

    p = sub.add_parser("sweep", parents=[common], help="fidelity grid from a JSON config")
    p.add_argument("--config", required=True)

    sub.add_parser("verify", parents=[common], help="run the acceptance criteria")
    return ap


def _tolerances(args) -> Tolerances:
    return DEFAULT_TOLERANCES.override(**dict(args.tol_override))


def _load_state(args, tol: Tolerances) -> GvbsState:
    if args.state is not None:
        if any(v is not None for v in (args.modes, args.x, args.s)):
            raise ValidationError("give either --state or --modes/--x/--s, not both")
        try:
            return GvbsState.load(args.state)
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise ValidationError(f"cannot read state file {args.state!r}: {exc}") from exc
    return build_gvbs(_spec(args), tol)


def _spec(args) -> GvbsSpec:
    missing = [f"--{n}" for n in ("modes", "x", "s") if getattr(args, n) is None]
    if missing:
        raise ValidationError(f"missing {', '.join(missing)} (or pass --state)")
    return GvbsSpec(args.modes, StandardFormParams(args.x, args.s), parse_bond(args.bond))


def _check_sites(state: GvbsState, sites) -> tuple[int, int]:
    n = state.cm.n_modes
    i, j = (int(v) for v in sites)
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise ValidationError(f"sites must be two distinct indices in 0..{n - 1}, got {i} {j}")
    return i, j


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_build(run: Run, tol: Tolerances) -> int:
    spec = _spec(run.args)
    state = build_gvbs(spec, tol)
    ok, margin = is_physical(state.cm, tol)
    pur = purity(state.cm, tol)
    cyc = cyclic_symmetry_error(state.cm)
    run.extra["spec"] = spec.to_dict()
    run.emit(_json(state.to_dict()))
    run.say(f"purity {_fmt(pur)}")
    run.say(f"physicality margin {_fmt(margin)} ({'physical' if ok else 'UNPHYSICAL'})")
    run.say(f"cyclic symmetry deviation {_fmt(cyc)}")
    return 0


def cmd_reduce(run: Run, tol: Tolerances) -> int:
    state = _load_state(run.args, tol)
    i, j = _check_sites(state, run.args.sites)
    red = two_mode_reduction(state, i, j)
    run.emit(_json({"sites": [i, j], "distance": ring_distance(i, j, state.cm.n_modes), "cm": red.to_dict()}))
    return 0


def _pair_record(state: GvbsState, i: int, j: int, tol: Tolerances) -> dict:
    red = two_mode_reduction(state, i, j)
    nus = pt_spectrum(PartitionedState(red, (0,)), tol)
    try:
        eof = eof_symmetric(red, tol)
    except SymmetryError:
        eof = None
    return {
        "sites": [i, j],
        "distance": ring_distance(i, j, state.cm.n_modes),
        "nu_minus": float(nus[0]),
        "pt_spectrum": [float(v) for v in nus],
        "log_negativity": log_negativity(red, tol),
        "eof": eof,
        "entangled": bool(nus[0] < 1.0 - tol.phys),
    }


def cmd_entangle(run: Run, tol: Tolerances) -> int:
    state = _load_state(run.args, tol)
    if run.args.sites is not None:
        pairs = [_check_sites(state, run.args.sites)]
    else:
        pairs = [(0, k) for k in range(1, state.cm.n_modes // 2 + 1)]
    records = [_pair_record(state, i, j, tol) for i, j in pairs]
    run.emit(_json({"spec": state.spec.to_dict(), "pairs": records}))
    for r in records:
        run.say(f"sites {r['sites']}: nu_minus {_fmt(r['nu_minus'])}, E_N {_fmt(r['log_negativity'])}")
    return 0


def cmd_thresholds(run: Run, tol: Tolerances) -> int:
    a = run.args
    if not 1 <= a.k <= a.n_sites // 2 or a.n_sites < 3:
        raise ValidationError(f"need N >= 3 and 1 <= k <= N/2, got N={a.n_sites} k={a.k}")
    if not a.x_min <= a.x_max:
        raise ValidationError(f"--x-min {a.x_min} exceeds --x-max {a.x_max}")
    bond = parse_bond(a.bond)
    xs = np.linspace(a.x_min, a.x_max, a.steps)
    curve = threshold_curve(a.k, a.n_sites, xs, bond, tol)
    extra = {}
    if a.n_sites == 6 and a.k in (2, 3):
        extra["closed_form"] = [_closed_form(float(x), a.k) for x in xs]
    run.emit(curve.to_csv(extra))
    failed = sum(1 for p in curve.samples if p.reason)
    run.say(f"{len(curve.samples)} thresholds, {failed} failed")
    return 0


def _closed_form(x: float, k: int) -> float:
    if not x > 1.0:
        return float("nan")
    return x if k == 3 else s2_polynomial_root(x)


def cmd_fidelity(run: Run, tol: Tolerances) -> int:
    state = _load_state(run.args, tol)
    i, j = _check_sites(state, run.args.sites)
    red = two_mode_reduction(state, i, j)
    nu = float(pt_spectrum(PartitionedState(red, (0,)), tol)[0])
    rec = {
        "spec": state.spec.to_dict(),
        "sites": [i, j],
        "distance": ring_distance(i, j, state.cm.n_modes),
        "raw_fidelity": teleport_fidelity(red),
        "optimal_fidelity": optimal_fidelity(nu),
        "nu_minus": nu,
        "classical_bound": CLASSICAL_FIDELITY,
    }
    if run.args.numeric:
        opt = optimize_fidelity_numeric(red)
        rec["numeric_fidelity"] = opt.fidelity
        rec["numeric_params"] = list(opt.params)
        rec["numeric_evaluations"] = opt.evaluations
    rec["nonclassical"] = rec["optimal_fidelity"] > CLASSICAL_FIDELITY
    run.emit(_json(rec))
    run.say(f"raw {_fmt(rec['raw_fidelity'])}, optimal {_fmt(rec['optimal_fidelity'])}")
    return 0


def cmd_sweep(run: Run, tol: Tolerances) -> int:
    try:
        cfg = json.loads(Path(run.args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {run.args.config!r}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ValidationError("sweep config must be a JSON object")
    if cfg.get("mode", "optimal") not in MODES:
        raise ValidationError(f"mode must be one of {MODES}")
    grid = grid_from_config(cfg, tol)
    run.extra["config"] = cfg
    run.extra["bond"] = grid.bond
    run.extra["mode"] = grid.mode
    run.emit(grid.to_csv())
    if run.args.out is not None:
        run.emit(grid.to_json() + "\n", Path(run.args.out).with_suffix(".json"))
    bad = sum(1 for p in grid.points if p.error)
    run.say(f"{len(grid.points)} grid points ({grid.mode}, bond {grid.bond}), {bad} failed")
    return 0


def cmd_verify(run: Run, tol: Tolerances) -> int:
    results = run_all(tol)
    report = {"criteria": [r.report() for r in results], "passed": all(r.passed for r in results)}
    run.extra["timing"] = {f"C{r.id}": r.timing for r in results if r.timing}
    run.emit(_json(report))
    for r in results:
        run.say(r.line())
    return 0 if report["passed"] else 1


HANDLERS = {
    "build": cmd_build,
    "reduce": cmd_reduce,
    "entangle": cmd_entangle,
    "thresholds": cmd_thresholds,
    "fidelity": cmd_fidelity,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def _manifest_path(args) -> Path:
    if args.manifest:
        return Path(args.manifest)
    if args.out:
        return Path(str(args.out) + ".manifest.json")
    return Path(f"gvbs-{args.command}.manifest.json")


def _params(args) -> dict:
    out = {}
    for k, v in vars(args).items():
        if k == "tol_override":
            v = dict(v)
        elif isinstance(v, tuple):
            v = list(v)
        out[k] = v
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    run = Run(args, argv)
    start = time.perf_counter()
    status, error = "ok", None
    tol = DEFAULT_TOLERANCES
    try:
        tol = _tolerances(args)
        code = HANDLERS[args.command](run, tol)
        if code:
            status = "failed"
    except (ValidationError, ValueError, KeyError) as exc:
        # ValidationError subclasses ValueError; both mean bad input
        code, status, error = 2, "invalid-input", f"{type(exc).__name__}: {exc}"
    except GvbsError as exc:
        code, status, error = 1, "numerical-failure", f"{type(exc).__name__}: {exc}"
    except Exception as exc:  # still leave a manifest behind
        traceback.print_exc()
        code, status, error = 1, "internal-error", f"{type(exc).__name__}: {exc}"
    if error:
        print(f"gvbs {args.command}: {error}", file=sys.stderr)

    manifest = {
        "command": "gvbs " + shlex.join(run.argv),
        "subcommand": args.command,
        "parameters": _params(args),
        "version": __version__,
        "backend": BACKEND,
        "tolerances": tol.as_dict(),
        "wall_time_s": time.perf_counter() - start,
        "outputs": run.outputs,
        "status": status,
        "exit_code": code,
        "error": error,
        **run.extra,
    }
    path = _manifest_path(args)
    try:
        path.write_text(_json(manifest), encoding="utf-8")
    except OSError as exc:
        print(f"gvbs: could not write manifest {path}: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
