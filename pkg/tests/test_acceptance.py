"""Acceptance criteria; one PASS/FAIL line per criterion is echoed at the end of the run."""

import pytest

from gvbs.acceptance import CRITERIA

RESULTS = []


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"C{i + 1}" for i in range(len(CRITERIA))])
def test_criterion(criterion):
    res = criterion()
    RESULTS.append(res)
    print(res.line())
    assert res.passed, res.line()


def test_harness_flags_tampered_physicality_tolerance():
    from gvbs.acceptance import c5_threshold_s1
    from gvbs.config import DEFAULT_TOLERANCES

    assert not c5_threshold_s1(DEFAULT_TOLERANCES.override(phys=1.0)).passed
