"""Hot numeric kernels with a numba path and a pure-numpy path.

The numba versions are used unless the environment variable
``GVBS_DISABLE_JIT`` is set to a truthy value (or numba cannot be imported).
Both paths are always importable so tests and ``benchmarks/`` can compare them.

Ring layout shared by the projection kernels (site-major):

* input space: 2 modes per site, site ``i`` owns input modes ``2i`` (input-1)
  and ``2i + 1`` (input-2);
* bond ``i`` joins input-2 of site ``i`` with input-1 of site ``i + 1 (mod N)``;
* output space: one mode per site.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_FLAG = os.environ.get("GVBS_DISABLE_JIT", "").strip().lower()
USE_NUMBA = numba is not None and _FLAG not in {"1", "true", "yes", "on"}
BACKEND = "numba" if USE_NUMBA else "numpy"


# --------------------------------------------------------------------------
# numpy reference path
# --------------------------------------------------------------------------


def _ring_blocks_numpy(block, n_sites):
    eye = np.eye(n_sites)
    g_ss = np.kron(eye, block[:4, :4])
    g_sx = np.kron(eye, block[:4, 4:])
    g_x = np.kron(eye, block[4:, 4:])
    return g_ss, g_sx, g_x


def _bond_phase_indices(n_sites):
    a = 2 * np.arange(n_sites) + 1
    b = (2 * np.arange(n_sites) + 2) % (2 * n_sites)
    return a, b


def ring_schur_numpy(block, n_sites, r):
    g_ss, g_sx, g_x = _ring_blocks_numpy(block, n_sites)
    c, sh = np.cosh(2.0 * r), np.sinh(2.0 * r)
    g_in = np.zeros_like(g_ss)
    a, b = _bond_phase_indices(n_sites)
    qa, pa, qb, pb = 2 * a, 2 * a + 1, 2 * b, 2 * b + 1
    g_in[qa, qa] = g_in[pa, pa] = g_in[qb, qb] = g_in[pb, pb] = c
    g_in[qa, qb] = g_in[qb, qa] = sh
    g_in[pa, pb] = g_in[pb, pa] = -sh
    theta = np.tile([1.0, -1.0], 2 * n_sites)
    m = g_ss + theta[:, None] * g_in * theta[None, :]
    cond = np.linalg.cond(m)
    out = g_x - g_sx.T @ np.linalg.solve(m, g_sx)
    return 0.5 * (out + out.T), cond


def epr_constraint_basis_numpy(n_sites):
    """Orthonormal basis of the subspace left finite by infinitely squeezed bonds.

    For each bond the columns are ``(q_a - q_b)/sqrt(2)`` and ``(p_a + p_b)/sqrt(2)``,
    the directions along which the two-mode squeezed covariance shrinks as
    ``exp(-2r)``.
    """
    v = np.zeros((4 * n_sites, 2 * n_sites))
    a, b = _bond_phase_indices(n_sites)
    cols = np.arange(n_sites)
    h = np.sqrt(0.5)
    v[2 * a, 2 * cols] = h
    v[2 * b, 2 * cols] = -h
    v[2 * a + 1, 2 * cols + 1] = h
    v[2 * b + 1, 2 * cols + 1] = h
    return v


def ring_schur_epr_numpy(block, n_sites):
    g_ss, g_sx, g_x = _ring_blocks_numpy(block, n_sites)
    v = epr_constraint_basis_numpy(n_sites)
    reduced = v.T @ g_ss @ v
    cond = np.linalg.cond(reduced)
    w = v.T @ g_sx
    out = g_x - w.T @ np.linalg.solve(reduced, w)
    return 0.5 * (out + out.T), cond


def _det2(m):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def pt_nu_minus_numpy(cms):
    cms = np.asarray(cms, dtype=float)
    seralian = _det2(cms[..., :2, :2]) + _det2(cms[..., 2:, 2:]) - 2.0 * _det2(cms[..., :2, 2:])
    det = np.linalg.det(cms)
    disc = np.maximum(seralian * seralian - 4.0 * det, 0.0)
    # rationalised root: no cancellation when nu_minus is small
    den = seralian + np.sqrt(disc)
    with np.errstate(divide="ignore", invalid="ignore"):
        nu2 = np.where(den > 0.0, 2.0 * det / den, 0.0)
    return np.sqrt(np.maximum(nu2, 0.0))


def teleport_fidelity_numpy(cms, gamma_in):
    cms = np.asarray(cms, dtype=float)
    xi = np.array([-1.0, 1.0])
    g_a = cms[..., :2, :2]
    g_b = cms[..., 2:, 2:]
    e_ab = cms[..., :2, 2:]
    sigma = (
        2.0 * gamma_in
        + xi[:, None] * g_a * xi[None, :]
        + g_b
        + xi[:, None] * e_ab
        + np.swapaxes(e_ab, -1, -2) * xi[None, :]
    )
    return 2.0 / np.sqrt(_det2(sigma))


# --------------------------------------------------------------------------
# numba path
# --------------------------------------------------------------------------


def _assemble_ring_loops(block, n_sites):
    dim_in = 4 * n_sites
    dim_out = 2 * n_sites
    g_ss = np.zeros((dim_in, dim_in))
    g_sx = np.zeros((dim_in, dim_out))
    g_x = np.zeros((dim_out, dim_out))
    for i in range(n_sites):
        for u in range(4):
            for w in range(4):
                g_ss[4 * i + u, 4 * i + w] = block[u, w]
            for w in range(2):
                g_sx[4 * i + u, 2 * i + w] = block[u, 4 + w]
        for u in range(2):
            for w in range(2):
                g_x[2 * i + u, 2 * i + w] = block[4 + u, 4 + w]
    return g_ss, g_sx, g_x


def _symmetrize_inplace(out):
    n = out.shape[0]
    for u in range(n):
        for w in range(u + 1, n):
            avg = 0.5 * (out[u, w] + out[w, u])
            out[u, w] = avg
            out[w, u] = avg


def _ring_schur_loops(block, n_sites, r):
    m, g_sx, out = _assemble_ring_loops(block, n_sites)
    c = np.cosh(2.0 * r)
    sh = np.sinh(2.0 * r)
    for i in range(n_sites):
        a = 2 * i + 1
        b = (2 * i + 2) % (2 * n_sites)
        qa, pa, qb, pb = 2 * a, 2 * a + 1, 2 * b, 2 * b + 1
        m[qa, qa] += c
        m[pa, pa] += c
        m[qb, qb] += c
        m[pb, pb] += c
        # theta flips both momenta, so the p-p correlation keeps its sign
        m[qa, qb] += sh
        m[qb, qa] += sh
        m[pa, pb] -= sh
        m[pb, pa] -= sh
    cond = np.linalg.cond(m)
    x = np.linalg.solve(m, g_sx)
    out -= np.ascontiguousarray(g_sx.T) @ x
    _symmetrize_inplace(out)
    return out, cond


def _ring_schur_epr_loops(block, n_sites):
    g_ss, g_sx, g_x = _assemble_ring_loops(block, n_sites)
    h = np.sqrt(0.5)
    vt = np.zeros((2 * n_sites, 4 * n_sites))
    for i in range(n_sites):
        a = 2 * i + 1
        b = (2 * i + 2) % (2 * n_sites)
        vt[2 * i, 2 * a] = h
        vt[2 * i, 2 * b] = -h
        vt[2 * i + 1, 2 * a + 1] = h
        vt[2 * i + 1, 2 * b + 1] = h
    v = np.ascontiguousarray(vt.T)
    reduced = vt @ (g_ss @ v)
    w_mat = vt @ g_sx
    cond = np.linalg.cond(reduced)
    x = np.linalg.solve(reduced, w_mat)
    out = g_x - np.ascontiguousarray(w_mat.T) @ x
    _symmetrize_inplace(out)
    return out, cond


def _det_lu(g):
    # Gaussian elimination with partial pivoting (what LAPACK getrf does), inlined
    # because a per-matrix LAPACK call dominates the cost of 4x4 determinants
    a = g.copy()
    n = a.shape[0]
    det = 1.0
    for c in range(n):
        p = c
        for r in range(c + 1, n):
            if abs(a[r, c]) > abs(a[p, c]):
                p = r
        if a[p, c] == 0.0:
            return 0.0
        if p != c:
            for j in range(n):
                tmp = a[c, j]
                a[c, j] = a[p, j]
                a[p, j] = tmp
            det = -det
        det *= a[c, c]
        for r in range(c + 1, n):
            f = a[r, c] / a[c, c]
            for j in range(c + 1, n):
                a[r, j] -= f * a[c, j]
    return det


def _pt_nu_minus_loops(cms):
    n = cms.shape[0]
    res = np.empty(n)
    for k in range(n):
        g = cms[k]
        det_a = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        det_b = g[2, 2] * g[3, 3] - g[2, 3] * g[3, 2]
        det_c = g[0, 2] * g[1, 3] - g[0, 3] * g[1, 2]
        seralian = det_a + det_b - 2.0 * det_c
        det = _det_lu(g)
        disc = seralian * seralian - 4.0 * det
        if disc < 0.0:
            disc = 0.0
        den = seralian + np.sqrt(disc)
        val = 2.0 * det / den if den > 0.0 else 0.0
        res[k] = np.sqrt(val) if val > 0.0 else 0.0
    return res


def _teleport_fidelity_loops(cms, gamma_in):
    n = cms.shape[0]
    res = np.empty(n)
    for k in range(n):
        g = cms[k]
        # xi = diag(-1, 1)
        s00 = 2.0 * gamma_in[0, 0] + g[0, 0] + g[2, 2] - g[0, 2] - g[0, 2]
        s01 = 2.0 * gamma_in[0, 1] - g[0, 1] + g[2, 3] - g[0, 3] + g[1, 2]
        s10 = 2.0 * gamma_in[1, 0] - g[1, 0] + g[3, 2] + g[1, 2] - g[0, 3]
        s11 = 2.0 * gamma_in[1, 1] + g[1, 1] + g[3, 3] + g[1, 3] + g[1, 3]
        res[k] = 2.0 / np.sqrt(s00 * s11 - s01 * s10)
    return res


if USE_NUMBA:
    _assemble_ring_loops = numba.njit(cache=True)(_assemble_ring_loops)
    _symmetrize_inplace = numba.njit(cache=True)(_symmetrize_inplace)
    _det_lu = numba.njit(cache=True)(_det_lu)
    ring_schur_numba = numba.njit(cache=True)(_ring_schur_loops)
    ring_schur_epr_numba = numba.njit(cache=True)(_ring_schur_epr_loops)
    pt_nu_minus_numba = numba.njit(cache=True)(_pt_nu_minus_loops)
    teleport_fidelity_numba = numba.njit(cache=True)(_teleport_fidelity_loops)
else:
    ring_schur_numba = _ring_schur_loops
    ring_schur_epr_numba = _ring_schur_epr_loops
    pt_nu_minus_numba = _pt_nu_minus_loops
    teleport_fidelity_numba = _teleport_fidelity_loops


def ring_schur(block, n_sites, r):
    """Output CM and condition estimate for a ring with finitely squeezed bonds."""
    block = np.ascontiguousarray(block, dtype=np.float64)
    if USE_NUMBA:
        return ring_schur_numba(block, int(n_sites), float(r))
    return ring_schur_numpy(block, n_sites, r)


def ring_schur_epr(block, n_sites):
    """Output CM and condition estimate in the infinitely squeezed bond limit."""
    block = np.ascontiguousarray(block, dtype=np.float64)
    if USE_NUMBA:
        return ring_schur_epr_numba(block, int(n_sites))
    return ring_schur_epr_numpy(block, n_sites)


def pt_nu_minus(cms):
    """Smallest partially transposed symplectic eigenvalue of a stack of 4x4 CMs."""
    cms = np.ascontiguousarray(cms, dtype=np.float64).reshape(-1, 4, 4)
    if USE_NUMBA:
        return pt_nu_minus_numba(cms)
    return pt_nu_minus_numpy(cms)


def teleport_fidelity(cms, gamma_in):
    """Coherent-alphabet teleportation fidelity for a stack of 4x4 resource CMs."""
    cms = np.ascontiguousarray(cms, dtype=np.float64).reshape(-1, 4, 4)
    gamma_in = np.ascontiguousarray(gamma_in, dtype=np.float64)
    if USE_NUMBA:
        return teleport_fidelity_numba(cms, gamma_in)
    return teleport_fidelity_numpy(cms, gamma_in)
