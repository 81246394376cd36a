"""Acceptance gate: one line per criterion, each must pass within its time bound."""
import pytest

from treeprops.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{c.key}" for c in CRITERIA])
def test_criterion(crit, capsys):
    outcome = run_criterion(crit, seed=0)
    with capsys.disabled():
        print("\n" + outcome.line())
    assert outcome.passed, outcome.detail
