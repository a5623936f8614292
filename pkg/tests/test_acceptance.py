"""Acceptance gate: every criterion is run exactly and reports one line.

Run with ``pytest tests/test_acceptance.py -s`` to see the pass/fail lines.
"""

import json

import pytest

from relcalc import acceptance

CASES = [(name, fn) for name, fn in acceptance.CRITERIA]


def _short(details):
    text = json.dumps(details, sort_keys=True, default=str)
    return text if len(text) <= 160 else text[:157] + "..."


@pytest.mark.parametrize("name,fn", CASES, ids=[n.split()[0] for n, _ in CASES])
def test_criterion(name, fn):
    ok, details = fn()
    num, _, label = name.partition(" ")
    print(f"\ncriterion {num}: {'PASS' if ok else 'FAIL'} ({label}) {_short(details)}")
    assert ok, details
