"""Echo acceptance verdicts into the terminal summary."""

import corpus


def pytest_terminal_summary(terminalreporter):
    if not corpus.ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(corpus.ACCEPTANCE, key=lambda s: int(s.split()[0][1:])):
        terminalreporter.write_line(line)
