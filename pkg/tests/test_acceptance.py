"""Acceptance battery: one test per numbered check in the verify registry.

Each test prints the check's summary line and asserts its verdict.  The
unfolding check is a known honest failure: the profile curve's direction map
winds three times and the winding survives the normal flow, so its
self-crossings cannot clear; the check reports the measured counts.
"""

import pytest

from horocorr.verify import CRITERIA

IDS = [f"criterion-{i+1:02d}-{name}" for i, (name, _) in enumerate(CRITERIA)]


@pytest.mark.parametrize("name,check", CRITERIA, ids=IDS)
def test_criterion(name, check):
    result = check()
    print(result.line())
    assert result.passed, result.line()
