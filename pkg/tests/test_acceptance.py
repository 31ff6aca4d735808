"""Acceptance criteria 1-9, each run as one verification suite.

A one-line pass/fail summary per criterion is printed at the end of the
pytest session.
"""
import pytest

from spherefrac.verify import SUITES, run_suite

pytestmark = pytest.mark.acceptance

CRITERIA = sorted(SUITES.values(), key=lambda s: s.id)


@pytest.mark.parametrize("suite", CRITERIA, ids=[f"criterion{s.id}_{s.key}" for s in CRITERIA])
def test_criterion(suite, acceptance_record):
    result = run_suite(suite.key)
    acceptance_record(result)
    print(f"criterion {result.id} [{result.key}] {'PASS' if result.passed else 'FAIL'}")
    assert result.error is None, result.error
    failed = [c for c in result.checks if not c.passed and not c.informational]
    assert not failed, "; ".join(f"{c.name}: {c.value:.3g} > {c.tol:.3g}" for c in failed)
    assert result.passed
