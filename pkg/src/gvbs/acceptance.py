"""Exit criteria of the package, runnable from pytest and from ``gvbs verify``.

Every criterion is deterministic (fixed seeds) and returns a
:class:`CriterionResult`; none of them raise on failure.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .building_block import (
    StandardFormParams,
    invariants_match,
    local_invariants,
    optical_cm,
    optical_from_standard,
    s_min,
    standard_form_cm,
)
from .config import Tolerances, resolve
from .entanglement import (
    log_negativity,
    min_pt_symplectic_eigenvalue,
    s2_polynomial,
    s2_polynomial_root,
    threshold_s_k,
)
from .phase_space import two_mode_squeezed_cm
from .protocols import optimal_fidelity, optimize_fidelity_numeric, teleport_fidelity
from .valence_bond import (
    EprLimit,
    FiniteBond,
    GvbsSpec,
    build_gvbs,
    cyclic_symmetry_error,
    distance_reduction,
    swap_oracle,
)


@dataclass
class CriterionResult:
    id: int
    title: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""
    timing: dict = field(default_factory=dict)  # wall-clock figures, excluded from reports

    def __post_init__(self):
        # criteria compute with numpy scalars; reports must be plain JSON types
        self.passed = bool(self.passed)
        self.measured = float(self.measured)
        self.tolerance = float(self.tolerance)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] C{self.id:<2d} {self.title}: measured {self.measured:.3e} (tol {self.tolerance:.1e}) {self.detail}"

    def report(self) -> dict:
        d = asdict(self)
        d.pop("timing")
        return d


def _random_block(rng: np.random.Generator) -> StandardFormParams:
    x = float(rng.uniform(1.0, 4.0))
    while x == 1.0:
        x = float(rng.uniform(1.0, 4.0))
    s = s_min(x) + float(10 ** rng.uniform(-3.0, 1.0))
    return StandardFormParams(x, s)


def c1_standard_form_purity(tol: Tolerances | None = None) -> CriterionResult:
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(200):
        det = np.linalg.det(standard_form_cm(_random_block(rng)).data)
        worst = max(worst, abs(det - 1.0))
    return CriterionResult(1, "standard-form purity", worst <= 1e-8, worst, 1e-8, "200 random (x, s)")


def c2_optical_equivalence(tol: Tolerances | None = None) -> CriterionResult:
    rng = np.random.default_rng(102)
    failures, worst = 0, 0.0
    for _ in range(50):
        p = _random_block(rng)
        std = standard_form_cm(p)
        opt = optical_cm(optical_from_standard(p))
        a = np.array(local_invariants(opt))
        b = np.array(local_invariants(std))
        worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))))
        failures += not invariants_match(opt, std, 1e-8)
    return CriterionResult(2, "optical/standard equivalence", failures == 0, worst, 1e-8, f"{failures}/50 mismatches")


def c3_gvbs_purity_and_symmetry(tol: Tolerances | None = None) -> CriterionResult:
    rng = np.random.default_rng(103)
    worst_det, worst_cyc = 0.0, 0.0
    for n in (3, 4, 6):
        for trial in range(20):
            bond = EprLimit() if trial % 2 == 0 else FiniteBond(float(rng.uniform(0.5, 6.0)))
            state = build_gvbs(GvbsSpec(n, _random_block(rng), bond), tol)
            worst_det = max(worst_det, abs(float(np.linalg.det(state.cm.data)) - 1.0))
            worst_cyc = max(worst_cyc, cyclic_symmetry_error(state.cm))
    ok = worst_det <= 1e-6 and worst_cyc <= 1e-8
    return CriterionResult(
        3, "GVBS purity and cyclic symmetry", ok, worst_det, 1e-6, f"max cyclic deviation {worst_cyc:.3e} (tol 1e-8)"
    )


def c4_swap_oracle(tol: Tolerances | None = None) -> CriterionResult:
    worst = 0.0
    for n in (3, 4, 6):
        for r in (2.0, 4.0, 6.0):
            for x, s in ((1.5, 1.6), (2.0, 3.0), (3.0, 5.0)):
                spec = GvbsSpec(n, StandardFormParams(x, s), FiniteBond(r))
                diff = np.max(np.abs(swap_oracle(spec, tol=tol).data - build_gvbs(spec, tol).cm.data))
                worst = max(worst, float(diff))
    return CriterionResult(4, "swap oracle equals Schur complement", worst <= 1e-8, worst, 1e-8, "N in {3,4,6}, r in {2,4,6}")


def c5_threshold_s1(tol: Tolerances | None = None) -> CriterionResult:
    tol = resolve(tol)
    cut = 1.0 - tol.phys
    bad = []
    margin = np.inf
    for n in (4, 6, 8):
        for x in (1.5, 2.0, 3.0):
            near = build_gvbs(GvbsSpec(n, StandardFormParams(x, s_min(x) + 1e-6)), tol)
            nu1 = min_pt_symplectic_eigenvalue(distance_reduction(near, 1), tol)
            if not nu1 < cut:
                bad.append(f"N={n} x={x} k=1 separable")
            margin = min(margin, cut - nu1)
            at = build_gvbs(GvbsSpec(n, StandardFormParams(x, s_min(x))), tol)
            for k in range(2, n // 2 + 1):
                nu = min_pt_symplectic_eigenvalue(distance_reduction(at, k), tol)
                if not nu >= cut:
                    bad.append(f"N={n} x={x} k={k} entangled")
                margin = min(margin, nu - cut)
    return CriterionResult(
        5, "nearest-neighbour-only entanglement at s_min", not bad, float(margin), tol.phys, "; ".join(bad) or "N in {4,6,8}"
    )


def c6_threshold_s3(tol: Tolerances | None = None) -> CriterionResult:
    worst = max(abs(threshold_s_k(x, 3, 6, EprLimit(), tol).s_k - x) for x in (1.5, 2.0, 2.5, 3.0))
    return CriterionResult(6, "s_3(x) = x for N = 6", worst <= 1e-6, float(worst), 1e-6)


def c7_threshold_s2(tol: Tolerances | None = None) -> CriterionResult:
    worst, worst_res = 0.0, 0.0
    for x in (1.5, 2.0, 3.0):
        root = s2_polynomial_root(x)
        worst = max(worst, abs(threshold_s_k(x, 2, 6, EprLimit(), tol).s_k - root))
        worst_res = max(worst_res, abs(s2_polynomial(root, x)))
    ok = worst <= 1e-6 and worst_res < 1e-8
    return CriterionResult(7, "s_2(x) equals the polynomial root", ok, float(worst), 1e-6, f"polynomial residual {worst_res:.3e} (tol 1e-8)")


def c8_fidelity_closed_form(tol: Tolerances | None = None) -> CriterionResult:
    worst = 0.0
    for r in (0.0, 0.5, 1.0, 2.0):
        worst = max(worst, abs(teleport_fidelity(two_mode_squeezed_cm(r)) - 1.0 / (1.0 + np.exp(-2 * r))))
    exact = teleport_fidelity(two_mode_squeezed_cm(0.0)) == 0.5
    return CriterionResult(
        8, "teleport fidelity of two-mode squeezed resources", worst <= 1e-12 and exact, float(worst), 1e-12,
        f"r=0 gives exactly 1/2: {exact}",
    )


def c9_optimal_fidelity(tol: Tolerances | None = None) -> CriterionResult:
    rng = np.random.default_rng(109)
    start = time.perf_counter()
    worst = 0.0
    for trial in range(20):
        k = 1 + trial % 3
        state = build_gvbs(GvbsSpec(6, _random_block(rng)), tol)
        red = distance_reduction(state, k)
        numeric = optimize_fidelity_numeric(red).fidelity
        worst = max(worst, abs(numeric - optimal_fidelity(min_pt_symplectic_eigenvalue(red, tol))))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-4 and elapsed <= 60.0
    return CriterionResult(
        9, "numeric local optimisation matches 1/(1+nu_minus)", ok, float(worst), 1e-4,
        "20 reductions, N=6, k in {1,2,3}; runtime bound 60 s", {"elapsed_s": elapsed},
    )


def c10_symmetric_limit(tol: Tolerances | None = None) -> CriterionResult:
    state = build_gvbs(GvbsSpec(6, StandardFormParams(2.0, 1e3)), tol)
    reds = [distance_reduction(state, k) for k in (1, 2, 3)]
    en = [log_negativity(r, tol) for r in reds]
    fo = [optimal_fidelity(min_pt_symplectic_eigenvalue(r, tol)) for r in reds]
    spread_en = max(en) - min(en)
    spread_f = max(fo) - min(fo)
    spread = max(spread_en, spread_f)
    return CriterionResult(
        10, "promiscuous symmetric limit s = 1e3", spread <= 1e-3, float(spread), 1e-3,
        f"E_N spread {spread_en:.3e}, F_opt spread {spread_f:.3e}",
    )


def c11_bond_degradation(tol: Tolerances | None = None) -> CriterionResult:
    block = StandardFormParams(2.0, 3.0)
    nus = [
        min_pt_symplectic_eigenvalue(distance_reduction(build_gvbs(GvbsSpec(6, block, FiniteBond(r)), tol), 1), tol)
        for r in (1.0, 2.0, 3.0, 4.0, 6.0)
    ]
    epr = min_pt_symplectic_eigenvalue(distance_reduction(build_gvbs(GvbsSpec(6, block), tol), 1), tol)
    steps = np.diff(nus + [epr])
    ok = bool(np.all(steps <= 0.0))
    return CriterionResult(
        11, "bond degradation monotonicity", ok, float(np.max(steps)), 0.0,
        "nu_minus at r=1,2,3,4,6,EPR: " + ", ".join(f"{v:.6f}" for v in nus + [epr]),
    )


def c12_range_order(tol: Tolerances | None = None) -> CriterionResult:
    tol = resolve(tol)
    bad = []
    for x in (1.5, 2.0, 3.0):
        s_k = [threshold_s_k(x, k, 6, EprLimit(), tol).s_k for k in (1, 2, 3)]
        if not s_k[0] <= s_k[1] <= s_k[2]:
            bad.append(f"x={x} thresholds out of order {s_k}")
        for s in np.linspace(s_min(x), 1.5 * s_k[2] + 1.0, 50):
            state = build_gvbs(GvbsSpec(6, StandardFormParams(x, float(s))), tol, check_ladder=False)
            ent = [min_pt_symplectic_eigenvalue(distance_reduction(state, k), tol) < 1.0 - tol.phys for k in (1, 2, 3)]
            # once a distance is entangled every shorter one must be too
            if any(ent[j] and not ent[j - 1] for j in (1, 2)):
                bad.append(f"x={x} s={s:.6f} entangled set {ent} not nested")
    return CriterionResult(12, "threshold ordering and nested entanglement", not bad, float(len(bad)), 0.0, "; ".join(bad) or "50-point s grids")


CRITERIA = (
    c1_standard_form_purity,
    c2_optical_equivalence,
    c3_gvbs_purity_and_symmetry,
    c4_swap_oracle,
    c5_threshold_s1,
    c6_threshold_s3,
    c7_threshold_s2,
    c8_fidelity_closed_form,
    c9_optimal_fidelity,
    c10_symmetric_limit,
    c11_bond_degradation,
    c12_range_order,
)


def run_all(tol: Tolerances | None = None) -> list[CriterionResult]:
    results = []
    for crit in CRITERIA:
        try:
            results.append(crit(tol))
        except Exception as exc:  # a crash counts as a failed criterion
            idx = CRITERIA.index(crit) + 1
            results.append(CriterionResult(idx, crit.__name__, False, float("nan"), float("nan"), f"raised {exc!r}"))
    return results
