import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


_VERDICTS = pytest.StashKey[dict]()


@pytest.fixture
def verdict(request):
    """``verdict(n, ok, detail)`` records one acceptance line, then asserts."""
    table = request.config.stash.setdefault(_VERDICTS, {})

    def record(n, ok, detail):
        table[n] = (bool(ok), detail)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return record


def pytest_terminal_summary(terminalreporter, config):
    table = config.stash.get(_VERDICTS, {})
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 10):
        if n not in table:
            terminalreporter.line(f"criterion {n}: NOT RUN")
            continue
        ok, detail = table[n]
        terminalreporter.line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
