import acceptance_log


def pytest_terminal_summary(terminalreporter):
    lines = acceptance_log.LINES
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
