"""Gaussian valence bond states on a periodic ring.

Global matrices use site-major ordering. Inside a site the building-block
modes are ordered (input-1, input-2, output); the output CM keeps one mode per
site, in site order. Bond ``i`` is a two-mode squeezed pair whose first half
meets input-2 of site ``i`` and whose second half meets input-1 of site
``i + 1`` (indices mod ``N``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from . import _kernels
from .building_block import R_MAX, StandardFormParams, standard_form_cm
from .config import Tolerances, resolve
from .errors import ConditioningError, ConvergenceError, ValidationError
from .phase_space import CovarianceMatrix, apply, as_cm, permute_modes, reduced_cm, twin_beam

EPR_LADDER = (4.0, 5.0, 6.0, 7.0, 8.0)
STATE_SUFFIX = ".gvbs.json"


@dataclass(frozen=True)
class FiniteBond:
    r: float

    def __post_init__(self):
        r = float(self.r)
        object.__setattr__(self, "r", r)
        if not np.isfinite(r) or r <= 0.0:
            raise ValidationError(f"bond squeezing must be positive, got {r!r}")
        if r > R_MAX:
            raise ValidationError(f"bond squeezing {r!r} exceeds the overflow guard r <= {R_MAX}")

    def to_dict(self) -> dict:
        return {"type": "finite", "r": self.r}

    def __str__(self) -> str:
        return f"r={self.r!r}"


@dataclass(frozen=True)
class EprLimit:
    def to_dict(self) -> dict:
        return {"type": "epr"}

    def __str__(self) -> str:
        return "epr"


Bond = Union[FiniteBond, EprLimit]


def parse_bond(text: str) -> Bond:
    """Parse ``"epr"`` or ``"r=VALUE"``."""
    t = text.strip().lower()
    if t == "epr":
        return EprLimit()
    if t.startswith("r="):
        try:
            return FiniteBond(float(t[2:]))
        except ValueError as exc:
            raise ValidationError(f"bad bond specification {text!r}: {exc}") from exc
    raise ValidationError(f"bond must be 'epr' or 'r=VALUE', got {text!r}")


def bond_from_dict(obj) -> Bond:
    if isinstance(obj, str):
        return parse_bond(obj)
    if obj.get("type") == "epr":
        return EprLimit()
    if obj.get("type") == "finite":
        return FiniteBond(obj["r"])
    raise ValidationError(f"unrecognised bond record {obj!r}")


@dataclass(frozen=True)
class GvbsSpec:
    n_sites: int
    block: StandardFormParams
    bond: Bond = field(default_factory=EprLimit)

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 3:
            raise ValidationError(f"a ring needs at least 3 sites, got {self.n_sites!r}")
        object.__setattr__(self, "n_sites", int(self.n_sites))

    def to_dict(self) -> dict:
        return {"n_sites": self.n_sites, "block": self.block.to_dict(), "bond": self.bond.to_dict()}

    @classmethod
    def from_dict(cls, obj: dict) -> "GvbsSpec":
        block = obj["block"]
        return cls(int(obj["n_sites"]), StandardFormParams(block["x"], block["s"]), bond_from_dict(obj["bond"]))


@dataclass(frozen=True)
class GvbsState:
    spec: GvbsSpec
    cm: CovarianceMatrix
    convergence_info: dict | None = None
    condition: float = float("nan")

    def to_dict(self) -> dict:
        return {"spec": self.spec.to_dict(), "cm": self.cm.to_dict(), "convergence": self.convergence_info or {}}

    @classmethod
    def from_dict(cls, obj: dict) -> "GvbsState":
        return cls(GvbsSpec.from_dict(obj["spec"]), CovarianceMatrix.from_dict(obj["cm"]), obj.get("convergence") or None)

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=1) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path) -> "GvbsState":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _check_condition(cond: float, tol: Tolerances, what: str) -> None:
    if not np.isfinite(cond) or cond > tol.cond_max:
        raise ConditioningError(f"{what} is too ill-conditioned to invert", cond)


def _finite_bond_cm(block: np.ndarray, n_sites: int, r: float, tol: Tolerances) -> tuple[np.ndarray, float]:
    if r > tol.r_max:
        raise ConditioningError(f"bond squeezing r={r!r} beyond the guard r <= {tol.r_max}", float("inf"))
    out, cond = _kernels.ring_schur(block, n_sites, r)
    _check_condition(cond, tol, "Gamma_ss + theta Gamma_in theta")
    return out, cond


def build_gvbs(spec: GvbsSpec, tol: Tolerances | None = None, check_ladder: bool = True) -> GvbsState:
    """Project the bond chain through the building blocks (Schur complement).

    Finite bonds evaluate the projection directly. For the EPR limit the
    divergent bond covariance is eliminated analytically: as ``r -> inf`` the
    inverse ``(Gamma_ss + theta Gamma_in theta)^-1`` tends to
    ``V (V^T Gamma_ss V)^-1 V^T`` with ``V`` spanning the bond directions whose
    variance shrinks as ``exp(-2r)``. When ``check_ladder`` is set, the
    finite-``r`` states on ``EPR_LADDER`` are compared against that limit and
    must approach it.
    """
    tol = resolve(tol)
    block = standard_form_cm(spec.block).data
    n = spec.n_sites
    if isinstance(spec.bond, FiniteBond):
        out, cond = _finite_bond_cm(block, n, spec.bond.r, tol)
        return GvbsState(spec, CovarianceMatrix(out, tol), None, float(cond))

    out, cond = _kernels.ring_schur_epr(block, n)
    _check_condition(cond, tol, "V^T Gamma_ss V")
    info: dict = {"method": "exact-limit", "condition": float(cond)}
    if check_ladder:
        info.update(_ladder_diagnostics(block, n, out, tol))
    return GvbsState(spec, CovarianceMatrix(out, tol), info, float(cond))


def _ladder_diagnostics(block: np.ndarray, n_sites: int, limit: np.ndarray, tol: Tolerances) -> dict:
    deltas = []
    for r in EPR_LADDER:
        cm_r, _ = _finite_bond_cm(block, n_sites, r, tol)
        deltas.append(float(np.max(np.abs(cm_r - limit))))
    d = np.array(deltas)
    floor = 1e-12 * max(1.0, float(np.max(np.abs(limit))))
    # deltas at roundoff level (e.g. x = 1, where bonds decouple) count as converged
    if d[-1] > floor and not (d[-1] < d[-2] and d[-1] < d[0]):
        raise ConvergenceError(f"finite-bond ladder does not approach the EPR limit: deltas {deltas}")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = d[1:] / d[:-1]
    return {
        "ladder_r": list(EPR_LADDER),
        "ladder_delta": deltas,
        "achieved_delta": deltas[-1],
        "contraction_ratio": float(ratios[-1]),
    }


def finite_bond_cm(spec: GvbsSpec, r: float, tol: Tolerances | None = None) -> CovarianceMatrix:
    """Output CM for the same building block with bonds of squeezing ``r``."""
    tol = resolve(tol)
    out, _ = _finite_bond_cm(standard_form_cm(spec.block).data, spec.n_sites, r, tol)
    return CovarianceMatrix(out, tol)


def swap_oracle(
    spec: GvbsSpec,
    boundaries=None,
    reverse: bool = False,
    tol: Tolerances | None = None,
) -> CovarianceMatrix:
    """Build the ring by projecting one site boundary at a time.

    Each step conditions the current state on the pair (input-2 of site ``i``,
    input-1 of site ``i + 1``) being found in the phase-space transposed
    two-mode squeezed state of the bond, i.e. one Gaussian Schur complement on
    a 4x4 block. ``boundaries`` restricts the projections (default: all);
    the result keeps the unmeasured modes in their original site-major order.
    """
    tol = resolve(tol)
    if not isinstance(spec.bond, FiniteBond):
        raise ValidationError("the swap oracle needs a finite bond")
    n = spec.n_sites
    block = standard_form_cm(spec.block).data
    gamma = np.kron(np.eye(n), block)
    labels = list(range(3 * n))  # global mode 3*i + {0: input-1, 1: input-2, 2: output}
    theta = np.diag([1.0, -1.0, 1.0, -1.0])
    # bond state generated by the twin-beam circuit, not the kernel's closed form
    bond = theta @ apply(twin_beam(spec.bond.r), CovarianceMatrix.vacuum(2)).data @ theta

    order = list(range(n)) if boundaries is None else [int(b) % n for b in boundaries]
    if reverse:
        order = order[::-1]
    for i in order:
        measured = [labels.index(3 * i + 1), labels.index(3 * ((i + 1) % n))]
        kept = [k for k in range(len(labels)) if k not in measured]
        m_idx = [q for k in measured for q in (2 * k, 2 * k + 1)]
        k_idx = [q for k in kept for q in (2 * k, 2 * k + 1)]
        mm = gamma[np.ix_(m_idx, m_idx)] + bond
        cond = np.linalg.cond(mm)
        _check_condition(cond, tol, f"projection block at boundary {i}")
        km = gamma[np.ix_(k_idx, m_idx)]
        gamma = gamma[np.ix_(k_idx, k_idx)] - km @ np.linalg.solve(mm, km.T)
        gamma = 0.5 * (gamma + gamma.T)
        labels = [labels[k] for k in kept]
    return CovarianceMatrix(gamma, tol)


def ring_distance(i: int, j: int, n_sites: int) -> int:
    d = abs(int(i) - int(j)) % n_sites
    return min(d, n_sites - d)


def two_mode_reduction(state: GvbsState | CovarianceMatrix, i: int, j: int) -> CovarianceMatrix:
    cm = state.cm if isinstance(state, GvbsState) else as_cm(state)
    if i == j:
        raise IndexError(f"two-mode reduction needs distinct sites, got {i} twice")
    return reduced_cm(cm, [i, j])


def distance_reduction(state: GvbsState | CovarianceMatrix, k: int) -> CovarianceMatrix:
    """Reduction of sites 0 and ``k``; by translational invariance this covers every distance-``k`` pair."""
    cm = state.cm if isinstance(state, GvbsState) else as_cm(state)
    n = cm.n_modes
    if not 1 <= k <= n // 2:
        raise IndexError(f"distance {k} out of range 1..{n // 2} for {n} sites")
    return two_mode_reduction(cm, 0, k)


def cyclic_shift(cm: CovarianceMatrix, steps: int = 1) -> CovarianceMatrix:
    n = as_cm(cm).n_modes
    return permute_modes(cm, [(k + steps) % n for k in range(n)])


def cyclic_symmetry_error(cm: CovarianceMatrix) -> float:
    cm = as_cm(cm)
    return float(np.max(np.abs(cyclic_shift(cm).data - cm.data)))
