"""Reference reproduction table, one test per row.

Every row's PASS/FAIL line is collected and printed in an "acceptance
table" section at the end of the pytest run.
"""

import pytest

from stationary_light.acceptance import CHECKS, run_all


@pytest.mark.parametrize("check", CHECKS, ids=[c.__name__.removeprefix("check_") for c in CHECKS])
def test_row(check, acceptance_log):
    result = run_all((check,))[0]
    acceptance_log.append(result.line())
    print(result.line())
    assert result.passed, result.line()
