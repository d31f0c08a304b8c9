import time

RUNTIME_LIMIT = 60.0
_start = {}


def pytest_sessionstart(session):
    _start["t"] = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - _start["t"]
    _start["elapsed"] = elapsed
    # a slow run fails the session even when every test passed
    if elapsed > RUNTIME_LIMIT and exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    elapsed = _start.get("elapsed", time.perf_counter() - _start["t"])
    ok = elapsed <= RUNTIME_LIMIT
    terminalreporter.write_line(
        f"[criterion 9] total test runtime: {'PASS' if ok else 'FAIL'} "
        f"({elapsed:.1f} s, limit {RUNTIME_LIMIT:.0f} s)")
