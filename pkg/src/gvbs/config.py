"""Numerical tolerances shared by every module.

A single immutable record is threaded through the public functions; callers
override individual entries with :meth:`Tolerances.override` rather than
mutating module state.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    sym: float = 1e-10  # entrywise |g_ij - g_ji|
    phys: float = 1e-9  # slack on symplectic eigenvalues >= 1
    pure: float = 1e-8  # relative slack on det = 1
    pairing: float = 1e-8  # relative mismatch allowed inside a symplectic eigenvalue pair
    cond_max: float = 1e12  # largest accepted condition number for the projection inverse
    r_max: float = 20.0  # overflow guard on squeezing parameters

    def override(self, **changes: float) -> "Tolerances":
        unknown = set(changes) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise KeyError(f"unknown tolerance key(s): {', '.join(sorted(unknown))}")
        return dataclasses.replace(self, **{k: float(v) for k, v in changes.items()})

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


DEFAULT_TOLERANCES = Tolerances()


def resolve(tol: Tolerances | None) -> Tolerances:
    return DEFAULT_TOLERANCES if tol is None else tol
