import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("BIHNLS_OUT_DIR", str(tmp_path / "out"))
    return tmp_path / "out"


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict: criterion(number, ok, detail)."""
    store = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def report(number: int, ok: bool, detail: str) -> bool:
        store.append((number, bool(ok), detail))
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        reporter = request.config.pluginmanager.get_plugin("terminalreporter")
        if reporter is not None:
            reporter.write_line("")
            reporter.write_line(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_ACCEPTANCE_KEY, [])
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted({n for n, _, _ in store}):
        parts = [(ok, d) for n, ok, d in store if n == number]
        ok = all(p for p, _ in parts)
        failing = [d for p, d in parts if not p]
        detail = "; ".join(failing) if failing else parts[-1][1] if len(parts) == 1 else f"{len(parts)} checks"
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
