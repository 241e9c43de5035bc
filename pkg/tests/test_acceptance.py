"""Acceptance criteria: one pass/fail line per criterion in the pytest summary."""

import pytest

from blhardy.acceptance import CHECKS, check_determinism, report_json, run_checks

SEED = 0


@pytest.fixture(scope="module")
def single_thread_results():
    return run_checks(SEED, threads=1)


@pytest.mark.parametrize("number", range(1, len(CHECKS) + 1))
def test_criterion(number, single_thread_results, acceptance_log):
    res = single_thread_results[number - 1]
    assert res.number == number
    acceptance_log.append(res.line())
    print(res.line())
    failed = [row for row in res.to_dict()["parts"] if not row["ok"]]
    assert res.passed, f"failed sub-checks: {failed}"


def test_determinism(single_thread_results, acceptance_log):
    res = check_determinism(SEED, reference=report_json(single_thread_results, SEED))
    acceptance_log.append(res.line())
    print(res.line())
    assert res.passed
