from acceptance_report import LINES


def pytest_terminal_summary(terminalreporter):
    if LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for n in sorted(LINES):
            terminalreporter.write_line(LINES[n])
