"""Pure bisymmetric three-mode building blocks.

Modes 0 and 1 form the input port, mode 2 the output port. Two
parametrizations are supported: the standard-form covariances ``(x, s)`` and the
squeezing degrees ``(r13, r12)`` of the two-twin-beam optical circuit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .errors import ConversionError, DimensionError, PhysicalityError, ValidationError
from .phase_space import CovarianceMatrix, apply, as_cm, reduced_cm, twin_beam

R_MAX = 20.0


def s_min(x: float) -> float:
    return 0.5 * (x + 1.0)


def _clamped_sqrt(v: float, what: str) -> float:
    # roundoff at the physicality boundary can push an exact zero slightly negative
    if v < 0.0:
        if v < -1e-9 * max(1.0, abs(v)):
            raise PhysicalityError(f"negative argument {v!r} under the square root of {what}")
        return 0.0
    return float(np.sqrt(v))


@dataclass(frozen=True)
class StandardFormParams:
    """Standard-form covariances of the building block.

    Attributes:
        x: local covariance of the output mode, ``x >= 1``.
        s: local covariance of each input mode, ``s >= (x + 1) / 2``.
    """

    x: float
    s: float

    def __post_init__(self):
        x, s = float(self.x), float(self.s)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "s", s)
        if not (np.isfinite(x) and np.isfinite(s)):
            raise PhysicalityError("x and s must be finite")
        if x < 1.0:
            raise PhysicalityError(f"x = {x!r} violates x >= 1")
        if s < s_min(x):
            raise PhysicalityError(f"s = {s!r} violates s >= s_min = (x+1)/2 = {s_min(x)!r}")

    @cached_property
    def _t_root(self) -> float:
        x, s = self.x, self.s
        return _clamped_sqrt(16 * s**4 - 8 * (x * x + 1) * s * s + (x * x - 1) ** 2, "t")

    @property
    def t_plus(self) -> float:
        return (self.x**2 - 1 + self._t_root) / (4 * self.s)

    @property
    def t_minus(self) -> float:
        return (self.x**2 - 1 - self._t_root) / (4 * self.s)

    @cached_property
    def _u_parts(self) -> tuple[float, float, float]:
        x, s = self.x, self.s
        pref = 0.25 * np.sqrt((x * x - 1) / (s * x))
        return pref, _clamped_sqrt((x - 2 * s) ** 2 - 1, "u"), float(np.sqrt((x + 2 * s) ** 2 - 1))

    @property
    def u_plus(self) -> float:
        pref, a, b = self._u_parts
        return pref * (a + b)

    @property
    def u_minus(self) -> float:
        pref, a, b = self._u_parts
        return pref * (a - b)

    def to_dict(self) -> dict:
        return {"x": self.x, "s": self.s}


@dataclass(frozen=True)
class OpticalParams:
    """Squeezing degrees of the twin-beam on modes (1,3) and then on modes (1,2)."""

    r13: float
    r12: float

    def __post_init__(self):
        r13, r12 = float(self.r13), float(self.r12)
        object.__setattr__(self, "r13", r13)
        object.__setattr__(self, "r12", r12)
        for name, v in (("r13", r13), ("r12", r12)):
            if not np.isfinite(v) or v < 0.0:
                raise PhysicalityError(f"{name} = {v!r} must be a finite nonnegative squeezing")
            if v > R_MAX:
                raise PhysicalityError(f"{name} = {v!r} exceeds the overflow guard |r| <= {R_MAX}")

    def to_dict(self) -> dict:
        return {"r13": self.r13, "r12": self.r12}


def params_from_dict(obj: dict) -> StandardFormParams | OpticalParams:
    """Parse ``{"x", "s"}`` or ``{"r13", "r12"}``, keeping the parametrization given."""
    keys = set(obj)
    if {"x", "s"} <= keys:
        return StandardFormParams(obj["x"], obj["s"])
    if {"r13", "r12"} <= keys:
        return OpticalParams(obj["r13"], obj["r12"])
    raise ValidationError(f"building block needs keys x,s or r13,r12; got {sorted(keys)}")


def standard_form_cm(params: StandardFormParams) -> CovarianceMatrix:
    p = params
    g = np.zeros((6, 6))
    g[0:2, 0:2] = g[2:4, 2:4] = p.s * np.eye(2)
    g[4:6, 4:6] = p.x * np.eye(2)
    e_ss = np.diag([p.t_plus, p.t_minus])
    e_sx = np.diag([p.u_plus, p.u_minus])
    g[0:2, 2:4] = e_ss
    g[2:4, 0:2] = e_ss.T
    g[0:2, 4:6] = g[2:4, 4:6] = e_sx
    g[4:6, 0:2] = g[4:6, 2:4] = e_sx.T
    return CovarianceMatrix(g)


def optical_cm(params: OpticalParams) -> CovarianceMatrix:
    """Covariance matrix produced by the optical circuit acting on three vacua."""
    circuit = twin_beam(params.r12, (0, 1), 3) @ twin_beam(params.r13, (0, 2), 3)
    return apply(circuit, CovarianceMatrix.vacuum(3))


def optical_cm_closed_form(params: OpticalParams) -> CovarianceMatrix:
    """Entrywise closed form of :func:`optical_cm`, kept as an independent check."""
    r13, r12 = params.r13, params.r12
    c13 = np.cosh(2 * r13)
    e2, e4 = np.exp(-2 * r12), np.exp(4 * r12)
    cs = np.cosh(r13) * np.sinh(r13)
    g_s = np.diag([0.5 * e2 * (e4 * c13 + 1), 0.5 * e2 * (c13 + e4)])
    e_ss = np.diag([0.5 * e2 * (e4 * c13 - 1), 0.5 * e2 * (c13 - e4)])
    e_sx = np.diag([np.sqrt(2) * np.exp(r12) * cs, -np.sqrt(2) * np.exp(-r12) * cs])
    g = np.zeros((6, 6))
    g[0:2, 0:2] = g[2:4, 2:4] = g_s
    g[4:6, 4:6] = c13 * np.eye(2)
    g[0:2, 2:4] = g[2:4, 0:2] = e_ss
    g[0:2, 4:6] = g[2:4, 4:6] = e_sx
    g[4:6, 0:2] = g[4:6, 2:4] = e_sx
    return CovarianceMatrix(g)


def local_invariants(gamma) -> tuple[float, ...]:
    """Determinants of all marginals of a three-mode CM.

    Returned order: single modes 0, 1, 2; pairs (0,1), (0,2), (1,2); the whole
    state. Two three-mode CMs related by local symplectics share this tuple.
    """
    gamma = as_cm(gamma)
    if gamma.n_modes != 3:
        raise DimensionError(f"local invariants need a three-mode CM, got {gamma.n_modes} modes")
    subsets = ([0], [1], [2], [0, 1], [0, 2], [1, 2])
    dets = [float(np.linalg.det(reduced_cm(gamma, m).data)) for m in subsets]
    dets.append(float(np.linalg.det(gamma.data)))
    return tuple(dets)


def invariants_match(a, b, atol: float = 1e-8) -> bool:
    ia, ib = np.array(local_invariants(a)), np.array(local_invariants(b))
    return bool(np.all(np.abs(ia - ib) <= atol * np.maximum(1.0, np.abs(ib))))


def optical_from_standard(params: StandardFormParams) -> OpticalParams:
    """Squeezing degrees whose circuit output is locally equivalent to ``params``.

    ``r13`` follows from the output-mode determinant alone (``cosh 2 r13 = x``).
    ``r12`` is found by root bracketing on the input-mode determinant, starting
    from the inverse-hyperbolic closed form; the answer is accepted only if all
    local invariants agree.
    """
    x, s = params.x, params.s
    r13 = 0.5 * float(np.arccosh(x))
    c13 = x
    guess_arg = (4 * s * s - x * x - 1) / (2 * x)
    guess = 0.25 * float(np.arccosh(max(guess_arg, 1.0)))

    def input_det_gap(r12: float) -> float:
        # det of an input-mode block of the circuit output minus s^2
        return 0.25 * (c13 * c13 + 1 + 2 * c13 * np.cosh(4 * r12)) - s * s

    if input_det_gap(0.0) >= 0.0:
        r12 = 0.0
    else:
        hi = max(2 * guess, 1e-3)
        while input_det_gap(hi) < 0.0:
            hi *= 2
            if hi > R_MAX:
                raise ConversionError(f"no r12 <= {R_MAX} reproduces s = {s!r}")
        r12 = brentq(input_det_gap, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    if abs(r12 - guess) > 1e-6 * max(1.0, guess):
        raise ConversionError(f"numeric r12 = {r12!r} disagrees with closed form {guess!r}")
    out = OpticalParams(r13, r12)
    if not invariants_match(optical_cm(out), standard_form_cm(params)):
        raise ConversionError(f"local invariants do not match for x={x!r}, s={s!r}")
    return out


def standard_from_optical(params: OpticalParams) -> StandardFormParams:
    """Standard-form covariances read off the circuit output's local determinants."""
    g = optical_cm(params)
    x = float(np.sqrt(np.linalg.det(g.block(2, 2))))
    s = float(np.sqrt(np.linalg.det(g.block(0, 0))))
    # guard the boundary s = (x+1)/2 against roundoff
    return StandardFormParams(max(x, 1.0), max(s, s_min(max(x, 1.0))))


def building_block_cm(params: StandardFormParams | OpticalParams) -> CovarianceMatrix:
    if isinstance(params, StandardFormParams):
        return standard_form_cm(params)
    return optical_cm(params)
