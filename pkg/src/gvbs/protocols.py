"""Teleportation and telecloning fidelities over Gaussian resources.

Inputs are coherent states unless stated otherwise (input CM = identity). The
classical benchmark for that alphabet is a fidelity of 1/2.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from .building_block import StandardFormParams
from .config import Tolerances, resolve
from .errors import DomainError, GvbsError, NumericalError, OptimizationError, ValidationError
from .phase_space import CovarianceMatrix, as_cm, is_physical, single_mode_symplectic
from .valence_bond import Bond, EprLimit, GvbsSpec, bond_from_dict, build_gvbs, distance_reduction

CLASSICAL_FIDELITY = 0.5
XI = np.diag([-1.0, 1.0])


@dataclass(frozen=True)
class TeleportResource:
    cm: CovarianceMatrix
    input_cm: CovarianceMatrix = field(default_factory=lambda: CovarianceMatrix.vacuum(1))

    def __post_init__(self):
        object.__setattr__(self, "cm", as_cm(self.cm))
        object.__setattr__(self, "input_cm", as_cm(self.input_cm))
        if self.cm.n_modes != 2 or self.input_cm.n_modes != 1:
            raise ValidationError("need a two-mode resource and a single-mode input")

    def check_physical(self, tol: Tolerances | None = None) -> None:
        for name, g in (("resource", self.cm), ("input", self.input_cm)):
            ok, margin = is_physical(g, tol)
            if not ok:
                raise ValidationError(f"{name} CM is unphysical (margin {margin:.3e})")


def _sigma(resource: np.ndarray, gamma_in: np.ndarray) -> np.ndarray:
    g_a = resource[:2, :2]
    g_b = resource[2:, 2:]
    e_ab = resource[:2, 2:]
    return 2.0 * gamma_in + XI @ g_a @ XI + g_b + XI @ e_ab + e_ab.T @ XI


def teleport_fidelity(res: TeleportResource | CovarianceMatrix) -> float:
    """Fidelity ``2 / sqrt(det Sigma)`` of two-user teleportation through ``res``.

    Mode 0 of the resource belongs to the sender, mode 1 to the receiver.
    """
    if not isinstance(res, TeleportResource):
        res = TeleportResource(res)
    sig = _sigma(res.cm.data, res.input_cm.data)
    det = float(sig[0, 0] * sig[1, 1] - sig[0, 1] * sig[1, 0])
    if not det > 0.0:
        raise NumericalError(f"det Sigma = {det!r} <= 0; resource or input corrupted")
    return 2.0 / np.sqrt(det)


def optimal_fidelity(nu_minus: float) -> float:
    """Coherent-state fidelity after optimising the resource over local symplectics."""
    if not nu_minus > 0.0:
        raise DomainError(f"nu_minus must be positive, got {nu_minus!r}")
    return 1.0 / (1.0 + nu_minus)


@dataclass(frozen=True)
class OptimizedFidelity:
    fidelity: float
    params: tuple[float, ...]  # (phi1, r, phi2) for the sender, then the receiver
    evaluations: int
    raw_fidelity: float

    @property
    def gain(self) -> float:
        return self.fidelity - self.raw_fidelity


def _locally_transformed(resource: np.ndarray, p) -> np.ndarray:
    s = np.zeros((4, 4))
    s[:2, :2] = single_mode_symplectic(p[0], p[1], p[2])
    s[2:, 2:] = single_mode_symplectic(p[3], p[4], p[5])
    return s @ resource @ s.T


_ANGLES = (0.0, np.pi / 4, np.pi / 2, 3 * np.pi / 4)
_SQUEEZES = (-0.5, 0.0, 0.5)


def optimize_fidelity_numeric(
    res: TeleportResource | CovarianceMatrix,
    budget: int = 10_000,
    target_tol: float = 1e-10,
) -> OptimizedFidelity:
    """Maximise the fidelity over single-mode symplectics on each resource mode.

    Each local operation is rotation * squeeze * rotation. A coarse grid over
    the six parameters seeds a Nelder-Mead refinement; the run stops once two
    consecutive refinements improve by less than ``target_tol``.
    """
    if not isinstance(res, TeleportResource):
        res = TeleportResource(res)
    base = res.cm.data
    g_in = res.input_cm.data
    evals = 0

    def neg_fid(p) -> float:
        nonlocal evals
        evals += 1
        sig = _sigma(_locally_transformed(base, p), g_in)
        det = sig[0, 0] * sig[1, 1] - sig[0, 1] * sig[1, 0]
        return -2.0 / np.sqrt(det) if det > 0 else 0.0

    local_grid = list(itertools.product(_ANGLES, _SQUEEZES, _ANGLES))
    best_val, best_p = np.inf, None
    for pa in local_grid:
        for pb in local_grid:
            p = np.array(pa + pb)
            v = neg_fid(p)
            if v < best_val:
                best_val, best_p = v, p

    previous = best_val
    while evals < budget:
        out = minimize(
            neg_fid,
            best_p,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14, "maxfev": budget - evals, "adaptive": True},
        )
        if out.fun < best_val:
            best_val, best_p = float(out.fun), np.asarray(out.x)
        if previous - best_val < target_tol:
            break
        previous = best_val
    else:
        raise OptimizationError(f"no convergence within {budget} evaluations", -best_val, tuple(best_p))
    return OptimizedFidelity(-best_val, tuple(float(v) for v in best_p), evals, teleport_fidelity(res))


# --------------------------------------------------------------------------
# telecloning sweeps
# --------------------------------------------------------------------------

MODES = ("raw", "optimal")


@dataclass
class GridPoint:
    x: float
    s: float
    k: int
    fidelity: float
    nu_minus: float
    error: str = ""

    @property
    def nonclassical(self) -> bool:
        return bool(np.isfinite(self.fidelity) and self.fidelity > CLASSICAL_FIDELITY)

    @property
    def entangled(self) -> bool:
        return bool(np.isfinite(self.nu_minus) and self.nu_minus < 1.0)


@dataclass
class FidelityGrid:
    n_sites: int
    k: int
    x_axis: list[float]
    s_axis: list[float]
    mode: str
    bond: str
    points: list[GridPoint] = field(default_factory=list)

    def values(self) -> np.ndarray:
        """Fidelities shaped ``(len(x_axis), len(s_axis))``."""
        return np.array([p.fidelity for p in self.points]).reshape(len(self.x_axis), len(self.s_axis))

    def nu_values(self) -> np.ndarray:
        return np.array([p.nu_minus for p in self.points]).reshape(len(self.x_axis), len(self.s_axis))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "s", "k", "fidelity", "nu_minus", "nonclassical", "error"])
        for p in self.points:
            w.writerow([_fmt(p.x), _fmt(p.s), p.k, _fmt(p.fidelity), _fmt(p.nu_minus), str(p.nonclassical).lower(), p.error])
        return buf.getvalue()

    def metadata(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "k": self.k,
            "mode": self.mode,
            "bond": self.bond,
            "x_axis": self.x_axis,
            "s_axis": self.s_axis,
        }

    def to_json(self) -> str:
        rows = [
            {"x": p.x, "s": p.s, "k": p.k, "fidelity": p.fidelity, "nu_minus": p.nu_minus,
             "nonclassical": p.nonclassical, "error": p.error}
            for p in self.points
        ]
        return json.dumps({**self.metadata(), "points": rows}, indent=1)


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def telecloning_grid(
    n_sites: int,
    k: int,
    x_grid,
    s_grid,
    mode: str = "optimal",
    bond: Bond | None = None,
    tol: Tolerances | None = None,
) -> FidelityGrid:
    """Telecloning fidelity from site 0 to a site at ring distance ``k`` on an (x, s) grid.

    ``raw`` evaluates the teleportation fidelity on the standard-form
    reduction; ``optimal`` uses ``1 / (1 + nu_minus)``. Points that fail
    (e.g. ``s < s_min(x)``) are kept with NaN values and an error message.
    Rows are x-major.
    """
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    if not 1 <= k <= n_sites // 2:
        raise ValidationError(f"distance k={k} out of range 1..{n_sites // 2}")
    tol = resolve(tol)
    bond = bond or EprLimit()
    xs = [float(v) for v in x_grid]
    ss = [float(v) for v in s_grid]
    grid = FidelityGrid(n_sites, k, xs, ss, mode, str(bond))

    reductions, slots = [], []
    for x, s in itertools.product(xs, ss):
        point = GridPoint(x, s, k, float("nan"), float("nan"))
        try:
            spec = GvbsSpec(n_sites, StandardFormParams(x, s), bond)
            reductions.append(distance_reduction(build_gvbs(spec, tol, check_ladder=False), k).data)
            slots.append(len(grid.points))
        except GvbsError as exc:
            point.error = f"{type(exc).__name__}: {exc}"
        grid.points.append(point)

    if reductions:
        stack = np.stack(reductions)
        nus = _kernels.pt_nu_minus(stack)
        if mode == "raw":
            fids = _kernels.teleport_fidelity(stack, np.eye(2))
        else:
            fids = 1.0 / (1.0 + nus)
        for slot, nu, f in zip(slots, nus, fids):
            grid.points[slot].nu_minus = float(nu)
            grid.points[slot].fidelity = float(f)
    return grid


def _axis(spec: dict) -> np.ndarray:
    steps = int(spec["steps"])
    if steps < 1:
        raise ValidationError(f"axis needs at least one step, got {steps}")
    return np.linspace(float(spec["min"]), float(spec["max"]), steps)


def grid_from_config(cfg: dict, tol: Tolerances | None = None) -> FidelityGrid:
    """Run a sweep described by ``{n_sites, k, x:{min,max,steps}, s:{min,max,steps}, mode, bond}``."""
    try:
        n_sites, k = int(cfg["n_sites"]), int(cfg["k"])
        xs, ss = _axis(cfg["x"]), _axis(cfg["s"])
        mode = cfg.get("mode", "optimal")
        bond = bond_from_dict(cfg.get("bond", "epr"))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"bad sweep config: {exc!r}") from exc
    return telecloning_grid(n_sites, k, xs, ss, mode, bond, tol)
