# This software is licensed under NNCL v1.4 see LICENSE.md for more info
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import pytest

from matgen.config import SUITE_NAMES, VerifySettings
from matgen.errors import ConfigError
from matgen.suites import MAX_EXAMPLES, CheckResult, Partial, SuiteReport, run_suite, run_suites


@pytest.mark.parametrize("name", SUITE_NAMES)
def test_suite_passes(name, small_settings):
    report = run_suite(name, small_settings)
    failing = [f"{c.name} r={c.r}: {c.details}" for c in report.checks if not c.passed]
    assert report.checks
    assert not failing, failing
    assert report.to_json()["pass"] is True


def test_rank_suite_labels(small_settings):
    report = run_suite("ranks", small_settings)
    labels = {(c.name, c.r) for c in report.checks}
    assert ("rank:T_CHART_3", 3) in labels
    assert ("rank:T_CHART_3", 2) not in labels
    assert ("rank:SIBIRSKII_MAP", 2) in labels
    for c in report.checks:
        assert c.count == small_settings.rank_samples
        assert c.details["observed_ranks"] == [c.details["expected_rank"]]


def test_montecarlo_cross_checks_the_first_block(small_settings):
    report = run_suite("montecarlo", small_settings)
    codim = next(c for c in report.checks if c.name == "codimension")
    assert codim.r == 2
    assert codim.count == 2 * small_settings.montecarlo_samples


def test_b2_suite_checks_the_friedland_reduction(small_settings):
    report = run_suite("b2", small_settings)
    check = next(c for c in report.checks if c.name == "friedland_reduction")
    assert check.passed
    assert check.count == small_settings.edge_samples + 1


def test_default_rank_suite_passes():
    report = run_suite("ranks", VerifySettings(seed=7))
    failing = [(c.name, c.r, c.details.get("max_drop_ratio")) for c in report.checks if not c.passed]
    assert not failing, failing


def test_report_does_not_depend_on_the_executor(small_settings):
    serial = run_suite("maps", small_settings).to_json()
    with ThreadPoolExecutor(max_workers=4) as pool:
        assert run_suite("maps", small_settings, pool).to_json() == serial


def test_process_pool_matches_serial(small_settings):
    serial = [r.to_json() for r in run_suites(["b2"], small_settings)]
    pooled = [r.to_json() for r in run_suites(["b2"], replace(small_settings, threads=2))]
    assert pooled == serial


def test_unknown_suite(small_settings):
    with pytest.raises(ConfigError):
        run_suite("everything", small_settings)


def test_partial_merge():
    a = Partial()
    a.record(0, True, 1e-12)
    a.record(1, False, float("nan"))
    a.stats = {"min_keep_ratio": 0.5, "max_drop_ratio": 1e-12, "observed_ranks": [4],
               "expected_rank": 4, "hit_count": 2}
    b = Partial()
    for k in range(2, 2 + MAX_EXAMPLES):
        b.record(k, False, 1e-3)
    b.stats = {"min_keep_ratio": 0.1, "max_drop_ratio": 1e-10, "observed_ranks": [3, 4],
               "expected_rank": 4, "hit_count": 5}
    a.merge(b)
    assert (a.count, a.failures) == (2 + MAX_EXAMPLES, 1 + MAX_EXAMPLES)
    assert a.worst == math.inf
    assert a.examples == [1, 2, 3, 4, 5]
    assert a.stats == {"min_keep_ratio": 0.1, "max_drop_ratio": 1e-10, "observed_ranks": [3, 4],
                       "expected_rank": 4, "hit_count": 7}


def test_check_result_json():
    bad = CheckResult("f_roundtrip", None, 3, 1, math.inf, False, {"failing_samples": [2]})
    good = CheckResult("g_odd", None, 3, 0, 0.0, True)
    assert bad.to_json()["worst_residual"] is None
    report = SuiteReport("b2", [good, bad])
    assert not report.passed
    assert report.to_json()["checks"][0] == {
        "name": "g_odd", "r": None, "count": 3, "failures": 0, "worst_residual": 0.0,
        "pass": True, "details": {},
    }
