"""Symplectic phase-space algebra for zero-mean Gaussian states.

Conventions used throughout the package:

* quadratures are interleaved, ``(q_1, p_1, ..., q_N, p_N)``;
* the vacuum covariance matrix is the identity;
* modes are 0-indexed.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .config import Tolerances, resolve
from .errors import DimensionError, NumericalError, PartitionError, SymmetryError

OMEGA_1 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), OMEGA_1)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


class CovarianceMatrix:
    """Real symmetric ``2N x 2N`` covariance matrix.

    Construction rejects non-square, odd-sized or asymmetric input. Physicality
    is *not* enforced here; use :func:`is_physical`.
    """

    __slots__ = ("data",)

    def __init__(self, data, tol: Tolerances | None = None):
        tol = resolve(tol)
        arr = np.asarray(data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2 or arr.shape[0] == 0:
            raise DimensionError(f"covariance matrix must be square with even size, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NumericalError("covariance matrix has non-finite entries")
        asym = np.max(np.abs(arr - arr.T))
        if asym > tol.sym:
            raise SymmetryError(f"covariance matrix not symmetric (max |g - g^T| = {asym:.3e})")
        self.data = _readonly(arr)

    @classmethod
    def vacuum(cls, n_modes: int) -> "CovarianceMatrix":
        return cls(np.eye(2 * n_modes))

    @property
    def n_modes(self) -> int:
        return self.data.shape[0] // 2

    def block(self, i: int, j: int) -> np.ndarray:
        """2x2 block coupling modes ``i`` and ``j``."""
        return self.data[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]

    def to_dict(self) -> dict:
        return {"n_modes": self.n_modes, "data": [float(v) for v in self.data.ravel()]}

    @classmethod
    def from_dict(cls, obj: dict, tol: Tolerances | None = None) -> "CovarianceMatrix":
        n = int(obj["n_modes"])
        data = np.asarray(obj["data"], dtype=float)
        if data.size != 4 * n * n:
            raise DimensionError(f"expected {4 * n * n} entries for {n} modes, got {data.size}")
        return cls(data.reshape(2 * n, 2 * n), tol)

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __repr__(self) -> str:
        return f"CovarianceMatrix(n_modes={self.n_modes})"


def as_cm(gamma) -> CovarianceMatrix:
    return gamma if isinstance(gamma, CovarianceMatrix) else CovarianceMatrix(gamma)


class SymplecticTransform:
    """Real ``2N x 2N`` matrix preserving the symplectic form."""

    __slots__ = ("data",)

    def __init__(self, data, check: bool = True):
        arr = np.asarray(data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2:
            raise DimensionError(f"symplectic matrix must be square with even size, got {arr.shape}")
        if check:
            omega = symplectic_form(arr.shape[0] // 2)
            scale = max(1.0, float(np.max(np.abs(arr))) ** 2)
            err = np.max(np.abs(arr @ omega @ arr.T - omega))
            if err > 1e-10 * scale:
                raise NumericalError(f"matrix is not symplectic (max |S W S^T - W| = {err:.3e})")
            det = np.linalg.det(arr)
            if abs(det - 1.0) > 1e-8 * scale:
                raise NumericalError(f"symplectic matrix has det {det!r} != 1")
        self.data = _readonly(arr)

    @property
    def n_modes(self) -> int:
        return self.data.shape[0] // 2

    def __matmul__(self, other: "SymplecticTransform") -> "SymplecticTransform":
        if not isinstance(other, SymplecticTransform):
            return NotImplemented
        if other.data.shape != self.data.shape:
            raise DimensionError("cannot compose transforms on different numbers of modes")
        return SymplecticTransform(self.data @ other.data, check=False)

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __repr__(self) -> str:
        return f"SymplecticTransform(n_modes={self.n_modes})"


def _embed_pair(local: np.ndarray, modes: Sequence[int], n_modes: int | None) -> SymplecticTransform:
    if len(modes) != 2:
        raise IndexError(f"expected a pair of modes, got {modes!r}")
    i, j = (int(m) for m in modes)
    if n_modes is None:
        n_modes = max(i, j) + 1
    if i == j:
        raise IndexError(f"duplicate mode index {i}")
    for m in (i, j):
        if not 0 <= m < n_modes:
            raise IndexError(f"mode index {m} out of range for {n_modes} modes")
    full = np.eye(2 * n_modes)
    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    full[np.ix_(idx, idx)] = local
    return SymplecticTransform(full, check=False)


def two_mode_squeezer(r: float, modes: Sequence[int] = (0, 1), n_modes: int | None = None) -> SymplecticTransform:
    """Phase-free two-mode squeezer: momentum of the first mode, position of the second."""
    if not np.isfinite(r):
        raise ValueError("squeezing must be finite")
    local = np.diag([np.exp(r), np.exp(-r), np.exp(-r), np.exp(r)])
    return _embed_pair(local, modes, n_modes)


def beam_splitter(theta: float, modes: Sequence[int] = (0, 1), n_modes: int | None = None) -> SymplecticTransform:
    """Phase-free beam splitter with transmittivity ``cos(theta)**2``."""
    if not np.isfinite(theta):
        raise ValueError("beam splitter angle must be finite")
    c, s = np.cos(theta), np.sin(theta)
    local = np.array(
        [
            [c, 0.0, s, 0.0],
            [0.0, c, 0.0, s],
            [s, 0.0, -c, 0.0],
            [0.0, s, 0.0, -c],
        ]
    )
    return _embed_pair(local, modes, n_modes)


def twin_beam(r: float, modes: Sequence[int] = (0, 1), n_modes: int | None = None) -> SymplecticTransform:
    """Two-mode squeezer followed by a 50:50 beam splitter on the same pair."""
    return beam_splitter(np.pi / 4, modes, n_modes) @ two_mode_squeezer(r, modes, n_modes)


def rotation(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, s], [-s, c]])


def single_mode_symplectic(phi1: float, r: float, phi2: float) -> np.ndarray:
    """Generic single-mode symplectic, rotation * squeeze * rotation (Euler form)."""
    return rotation(phi1) @ np.diag([np.exp(r), np.exp(-r)]) @ rotation(phi2)


def local_symplectic(blocks: Sequence[np.ndarray]) -> SymplecticTransform:
    return SymplecticTransform(scipy.linalg.block_diag(*blocks))


def random_symplectic(n_modes: int, rng: np.random.Generator, scale: float = 0.5) -> SymplecticTransform:
    """Random element of Sp(2N, R) as the exponential of a random Hamiltonian matrix."""
    h = rng.normal(scale=scale, size=(2 * n_modes, 2 * n_modes))
    h = 0.5 * (h + h.T)
    return SymplecticTransform(scipy.linalg.expm(symplectic_form(n_modes) @ h))


def apply(S: SymplecticTransform, gamma) -> CovarianceMatrix:
    """Congruence ``S gamma S^T``."""
    gamma = as_cm(gamma)
    s = np.asarray(S, dtype=float)
    if s.shape != gamma.data.shape:
        raise DimensionError(f"transform of shape {s.shape} cannot act on CM of shape {gamma.data.shape}")
    out = s @ gamma.data @ s.T
    return CovarianceMatrix(0.5 * (out + out.T))


def _det2(m: np.ndarray) -> float:
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def _two_mode_spectrum(g: np.ndarray) -> np.ndarray:
    # Williamson invariants: nu_-^2 + nu_+^2 = Delta, nu_-^2 nu_+^2 = det g
    delta = _det2(g[:2, :2]) + _det2(g[2:, 2:]) + 2.0 * _det2(g[:2, 2:])
    det = float(np.linalg.det(g))
    root = np.sqrt(max(delta * delta - 4.0 * det, 0.0))
    hi2 = 0.5 * (delta + root)
    lo2 = det / hi2 if hi2 > 0.0 else 0.0
    return np.sqrt(np.maximum([lo2, hi2], 0.0))


def symplectic_spectrum(gamma, tol: Tolerances | None = None) -> np.ndarray:
    """Sorted symplectic eigenvalues (moduli of the eigenvalues of ``i Omega gamma``).

    One- and two-mode states use the closed-form Williamson invariants, which
    are exact on product and vacuum states; larger states diagonalise
    ``i Omega gamma`` and check that the eigenvalues pair up.
    """
    tol = resolve(tol)
    gamma = as_cm(gamma)
    n = gamma.n_modes
    if n == 1:
        return np.array([np.sqrt(max(_det2(gamma.data), 0.0))])
    if n == 2:
        return _two_mode_spectrum(gamma.data)
    ev = np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ gamma.data))
    ev.sort()
    lo, hi = ev[0::2], ev[1::2]
    mismatch = np.abs(hi - lo) / np.maximum(1.0, hi)
    if np.any(mismatch > tol.pairing):
        raise NumericalError(
            f"symplectic eigenvalues failed to pair (worst relative mismatch {mismatch.max():.3e})"
        )
    return 0.5 * (lo + hi)


def _mode_list(modes, n_modes: int) -> list[int]:
    out = [int(m) for m in modes]
    if len(set(out)) != len(out):
        raise IndexError(f"duplicate mode indices in {out}")
    for m in out:
        if not 0 <= m < n_modes:
            raise IndexError(f"mode index {m} out of range for {n_modes} modes")
    return out


def partial_transpose(gamma, modes) -> CovarianceMatrix:
    """Mirror-reflect the momentum of every listed mode."""
    gamma = as_cm(gamma)
    n = gamma.n_modes
    try:
        idx = _mode_list(modes, n)
    except IndexError as exc:
        raise PartitionError(str(exc)) from exc
    if not idx or len(idx) >= n:
        raise PartitionError(f"partition must be a nonempty proper subset of {n} modes, got {idx}")
    flip = np.ones(2 * n)
    flip[[2 * m + 1 for m in idx]] = -1.0
    return CovarianceMatrix(flip[:, None] * gamma.data * flip[None, :])


class PhysicalityCheck(NamedTuple):
    physical: bool
    margin: float  # smallest symplectic eigenvalue minus one


def is_physical(gamma, tol: Tolerances | None = None) -> PhysicalityCheck:
    tol = resolve(tol)
    margin = float(symplectic_spectrum(gamma, tol)[0] - 1.0)
    return PhysicalityCheck(margin >= -tol.phys, margin)


def purity(gamma, tol: Tolerances | None = None) -> float:
    tol = resolve(tol)
    det = float(np.linalg.det(as_cm(gamma).data))
    if det < 1.0 - tol.pure:
        raise NumericalError(f"det = {det!r} < 1: covariance matrix is unphysical")
    return det**-0.5


def is_pure(gamma, tol: Tolerances | None = None) -> bool:
    tol = resolve(tol)
    return abs(float(np.linalg.det(as_cm(gamma).data)) - 1.0) <= tol.pure


def reduced_cm(gamma, modes) -> CovarianceMatrix:
    """Marginal on the listed modes, in the listed order."""
    gamma = as_cm(gamma)
    idx = _mode_list(modes, gamma.n_modes)
    if not idx:
        raise IndexError("empty mode list")
    rows = [q for m in idx for q in (2 * m, 2 * m + 1)]
    return CovarianceMatrix(gamma.data[np.ix_(rows, rows)])


def permute_modes(gamma, order) -> CovarianceMatrix:
    """Relabel modes: mode ``k`` of the result is mode ``order[k]`` of the input."""
    gamma = as_cm(gamma)
    if sorted(int(m) for m in order) != list(range(gamma.n_modes)):
        raise IndexError(f"{order!r} is not a permutation of {gamma.n_modes} modes")
    return reduced_cm(gamma, order)


def direct_sum(*cms) -> CovarianceMatrix:
    return CovarianceMatrix(scipy.linalg.block_diag(*(as_cm(g).data for g in cms)))


def two_mode_squeezed_cm(r: float) -> CovarianceMatrix:
    """Closed-form CM of the two-mode squeezed vacuum."""
    c, sh = np.cosh(2 * r), np.sinh(2 * r)
    return CovarianceMatrix(
        np.array([[c, 0, sh, 0], [0, c, 0, -sh], [sh, 0, c, 0], [0, -sh, 0, c]], dtype=float)
    )
