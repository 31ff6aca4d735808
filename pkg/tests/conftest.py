import numpy as np
import pytest

from spherefrac.verify import SUITES

# criterion -> (key, passed) collected by the acceptance tests
ACCEPTANCE_RESULTS: dict = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def acceptance_record():
    def record(result):
        ACCEPTANCE_RESULTS[result.id] = result
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE_RESULTS):
        r = ACCEPTANCE_RESULTS[cid]
        status = "PASS" if r.passed else "FAIL"
        detail = f"error: {r.error}" if r.error else f"worst value/tol {r.worst():.3g}"
        terminalreporter.write_line(f"criterion {cid} [{r.key}] {status}  {r.elapsed:.1f}s  {detail}")
    missing = sorted(set(range(1, len(SUITES) + 1)) - set(ACCEPTANCE_RESULTS))
    for cid in missing:
        terminalreporter.write_line(f"criterion {cid} not run")
