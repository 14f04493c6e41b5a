"""Acceptance criteria 1-9; each run adds one pass/fail line to the summary."""

import pytest

from torext import acceptance


def _check(number, record):
    (outcome,) = acceptance.run([number])
    print(outcome.line())
    record(outcome.line())
    assert outcome.passed, outcome.detail


@pytest.mark.parametrize("number", [n for n in sorted(acceptance.CRITERIA) if n not in acceptance.SLOW])
def test_criterion(number, record_acceptance):
    _check(number, record_acceptance)


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(acceptance.SLOW))
def test_stretch_criterion(number, record_acceptance):
    _check(number, record_acceptance)
