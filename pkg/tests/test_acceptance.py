"""Acceptance suite: one PASS/FAIL line per criterion (run with ``-s`` to see them)."""

import pytest

from virusmachines.reproduce import CRITERIA


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f.__name__.removeprefix("criterion_") for f in CRITERIA])
def test_criterion(criterion):
    result = criterion()
    print(result.line())
    for d in result.details:
        print(f"      {d}")
    assert result.passed, "\n".join(result.details)
