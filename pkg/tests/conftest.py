def pytest_terminal_summary(terminalreporter):
    """Collect the one-line criterion verdicts printed by the acceptance tests."""
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when != "call" or "test_acceptance" not in rep.nodeid:
                continue
            lines += [ln for ln in rep.capstdout.splitlines() if ln.startswith(("PASS C", "FAIL C"))]
    if lines:
        terminalreporter.section("acceptance criteria")
        for ln in sorted(lines, key=lambda s: int(s.split()[1][1:])):
            terminalreporter.write_line(ln if len(ln) < 240 else ln[:237] + "...")
