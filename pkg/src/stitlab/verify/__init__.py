"""Monte Carlo verification harness."""

from .report import CheckRecord, TestReport
from .statistics import STATISTICS, SummaryStatistic
from .stats import proportion_test, two_sample_test
from .suites import SUITES, SuiteConfig, run_suite

__all__ = [
    "CheckRecord", "TestReport", "SummaryStatistic", "STATISTICS", "proportion_test", "two_sample_test",
    "SUITES", "SuiteConfig", "run_suite",
]
