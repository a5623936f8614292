"""Layer homology of the quadratic fixtures against stored reports.

Regenerate with ``relcalc suite --golden-dir tests/golden --regen-golden``.
"""

import os

from relcalc.acceptance import check_golden

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def test_golden_layers():
    ok, info = check_golden(GOLDEN)
    assert ok, info
