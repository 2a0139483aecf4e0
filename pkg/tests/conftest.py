"""Shared test plumbing: the acceptance-criteria result banner."""

_RESULTS: list[tuple[str, str, bool]] = []


def record_criterion(cid: str, label: str, ok: bool) -> None:
    _RESULTS.append((cid, label, ok))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, label, ok in sorted(_RESULTS):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {cid} [{label}]: {status}")
