"""PPT separability, entanglement measures and entanglement-range thresholds.

All logarithms are base 2.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import bisect
from scipy.special import xlogy

from .building_block import StandardFormParams, s_min
from .config import Tolerances, resolve
from .errors import BracketError, ConvergenceError, DomainError, PartitionError, RootSelectionError, SymmetryError
from .phase_space import CovarianceMatrix, as_cm, partial_transpose, symplectic_spectrum
from .valence_bond import Bond, EprLimit, GvbsSpec, build_gvbs, distance_reduction

S_BRACKET_CEILING = 1e4


@dataclass(frozen=True)
class PartitionedState:
    cm: CovarianceMatrix
    part_a: tuple[int, ...]

    def __post_init__(self):
        cm = as_cm(self.cm)
        object.__setattr__(self, "cm", cm)
        a = tuple(sorted({int(m) for m in self.part_a}))
        if not a or len(a) >= cm.n_modes or a[0] < 0 or a[-1] >= cm.n_modes:
            raise PartitionError(f"invalid partition {self.part_a!r} of {cm.n_modes} modes")
        object.__setattr__(self, "part_a", a)

    @property
    def part_b(self) -> tuple[int, ...]:
        return tuple(m for m in range(self.cm.n_modes) if m not in self.part_a)

    @classmethod
    def one_vs_rest(cls, cm, mode: int = 0) -> "PartitionedState":
        return cls(cm, (mode,))


def _as_partitioned(state) -> PartitionedState:
    if isinstance(state, PartitionedState):
        return state
    return PartitionedState.one_vs_rest(state)


def pt_spectrum(state, tol: Tolerances | None = None) -> np.ndarray:
    st = _as_partitioned(state)
    return symplectic_spectrum(partial_transpose(st.cm, st.part_a), tol)


def min_pt_symplectic_eigenvalue(state, tol: Tolerances | None = None) -> float:
    """Smallest symplectic eigenvalue of the partial transpose (``nu_minus``).

    A bare CM is read as the bipartition mode 0 versus the rest.
    """
    return float(pt_spectrum(state, tol)[0])


def is_separable(state, tol: Tolerances | None = None) -> bool:
    tol = resolve(tol)
    return min_pt_symplectic_eigenvalue(state, tol) >= 1.0 - tol.phys


def log_negativity(state, tol: Tolerances | None = None) -> float:
    nu = pt_spectrum(state, tol)
    below = nu[nu < 1.0]
    return float(-np.sum(np.log2(below))) if below.size else 0.0


def eof_from_nu(nu_minus: float) -> float:
    """Entanglement of formation of a symmetric two-mode state from its ``nu_minus``."""
    if nu_minus <= 0.0:
        raise DomainError(f"nu_minus must be positive, got {nu_minus!r}")
    if nu_minus >= 1.0:
        # f(nu) = f(1/nu) > 0, so the max with zero alone would not vanish here
        return 0.0
    c_plus = (1.0 + nu_minus) ** 2 / (4.0 * nu_minus)
    c_minus = (1.0 - nu_minus) ** 2 / (4.0 * nu_minus)
    val = (xlogy(c_plus, c_plus) - xlogy(c_minus, c_minus)) / np.log(2.0)
    return float(max(0.0, val))


def eof_symmetric(cm, tol: Tolerances | None = None, atol: float = 1e-8) -> float:
    cm = as_cm(cm)
    if cm.n_modes != 2:
        raise SymmetryError(f"entanglement of formation needs a two-mode state, got {cm.n_modes} modes")
    gap = float(np.max(np.abs(cm.block(0, 0) - cm.block(1, 1))))
    if gap > atol:
        raise SymmetryError(f"single-mode reductions differ by {gap:.3e}; state is not symmetric")
    return eof_from_nu(min_pt_symplectic_eigenvalue(cm, tol))


# --------------------------------------------------------------------------
# thresholds s_k(x, N)
# --------------------------------------------------------------------------


def distance_nu_minus(
    x: float,
    s: float,
    k: int,
    n_sites: int,
    bond: Bond | None = None,
    tol: Tolerances | None = None,
) -> float:
    """``nu_minus`` of two ring sites at distance ``k`` in the GVBS built from ``(x, s)``."""
    spec = GvbsSpec(n_sites, StandardFormParams(x, s), bond or EprLimit())
    state = build_gvbs(spec, tol, check_ladder=False)
    return min_pt_symplectic_eigenvalue(distance_reduction(state, k), tol)


@dataclass(frozen=True)
class ThresholdResult:
    x: float
    k: int
    n_sites: int
    s_k: float
    residual: float  # nu_minus(s_k) - 1
    iterations: int
    bracket: tuple[float, float]
    at_boundary: bool  # already entangled at s_min, so s_k = s_min


def threshold_s_k(
    x: float,
    k: int,
    n_sites: int,
    bond: Bond | None = None,
    tol: Tolerances | None = None,
    xtol: float = 1e-13,
) -> ThresholdResult:
    """Smallest ``s`` beyond which sites at ring distance ``k`` are entangled.

    Brackets the crossing ``nu_minus = 1`` on ``[s_min(x), s_hi]`` and bisects.
    When the pair is already entangled at ``s_min`` (always the case for
    ``k = 1``) the threshold is ``s_min`` itself.
    """
    tol = resolve(tol)
    bond = bond or EprLimit()
    if not x > 1.0:
        raise DomainError(f"thresholds need x > 1 (x = 1 gives a product state), got {x!r}")
    if not 1 <= k <= n_sites // 2:
        raise DomainError(f"distance k={k} out of range 1..{n_sites // 2}")

    def g(s: float) -> float:
        return distance_nu_minus(x, s, k, n_sites, bond, tol) - 1.0

    lo = s_min(x)
    g_lo = g(lo)
    if g_lo < -tol.phys:
        return ThresholdResult(x, k, n_sites, lo, g_lo, 0, (lo, lo), True)

    hi = max(4.0 * x, 10.0)
    while g(hi) >= -tol.phys:
        if hi >= S_BRACKET_CEILING:
            raise BracketError(f"no separability crossing for k={k}, x={x!r}", (lo, hi))
        hi = min(2.0 * hi, S_BRACKET_CEILING)
    root, info = bisect(g, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500, full_output=True)
    if not info.converged:
        raise ConvergenceError(f"bisection did not converge for k={k}, x={x!r}")
    residual = g(root)
    if abs(residual) >= 1e-9:
        raise ConvergenceError(f"threshold residual {residual:.3e} above 1e-9 for k={k}, x={x!r}")
    return ThresholdResult(x, k, n_sites, float(root), float(residual), int(info.iterations), (lo, hi), False)


def s2_polynomial_coefficients(x: float) -> np.ndarray:
    """Coefficients (highest power first) of the N = 6, k = 2 threshold quartic in ``s**2``."""
    x2 = x * x
    return np.array(
        [
            72.0,
            -12.0 * (x2 + 1.0),
            -34.0 * x2 * x2 + 28.0 * x2 - 34.0,
            x2**3 - 5.0 * x2 * x2 - 5.0 * x2 + 1.0,
            (x2 - 1.0) ** 2 * (x2 * x2 - 6.0 * x2 + 1.0),
        ]
    )


def s2_polynomial(s: float, x: float) -> float:
    return float(np.polyval(s2_polynomial_coefficients(x), s * s))


def s2_polynomial_root(x: float) -> float:
    """Admissible root ``s >= s_min(x)`` of the N = 6 next-nearest-neighbour threshold polynomial."""
    if not x > 1.0:
        raise DomainError(f"x must exceed 1, got {x!r}")
    coeffs = s2_polynomial_coefficients(x)
    deriv = np.polyder(coeffs)
    candidates = []
    for u in np.roots(coeffs):
        if abs(u.imag) > 1e-8 * max(1.0, abs(u)) or u.real <= 0.0:
            continue
        u = u.real
        for _ in range(4):  # Newton polish in u = s^2
            d = np.polyval(deriv, u)
            if d == 0.0:
                break
            u -= np.polyval(coeffs, u) / d
        s = float(np.sqrt(u))
        if s >= s_min(x) - 1e-12:
            candidates.append(s)
    if len(candidates) != 1:
        raise RootSelectionError(f"expected one admissible root for x={x!r}, found {candidates}")
    return candidates[0]


@dataclass
class ThresholdPoint:
    x: float
    s_k: float
    residual: float
    iterations: int
    reason: str = ""


@dataclass
class ThresholdCurve:
    k: int
    n_sites: int
    bond: str
    samples: list[ThresholdPoint] = field(default_factory=list)

    def to_csv(self, extra: dict[str, list[float]] | None = None) -> str:
        """CSV text; ``extra`` appends named columns (one value per sample)."""
        extra = extra or {}
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "s_k", "residual", "iterations", *extra, "reason"])
        for n, p in enumerate(self.samples):
            w.writerow(
                [fmt(p.x), fmt(p.s_k), fmt(p.residual), p.iterations, *(fmt(v[n]) for v in extra.values()), p.reason]
            )
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {"k": self.k, "n_sites": self.n_sites, "bond": self.bond, "samples": [asdict(p) for p in self.samples]},
            indent=1,
        )


def fmt(v: float) -> str:
    return f"{float(v):.17g}"


def threshold_curve(
    k: int,
    n_sites: int,
    xs,
    bond: Bond | None = None,
    tol: Tolerances | None = None,
) -> ThresholdCurve:
    bond = bond or EprLimit()
    curve = ThresholdCurve(k, n_sites, str(bond))
    for x in xs:
        x = float(x)
        try:
            res = threshold_s_k(x, k, n_sites, bond, tol)
            curve.samples.append(ThresholdPoint(x, res.s_k, res.residual, res.iterations))
        except (BracketError, ConvergenceError, DomainError) as exc:
            curve.samples.append(ThresholdPoint(x, float("nan"), float("nan"), 0, f"{type(exc).__name__}: {exc}"))
    return curve
