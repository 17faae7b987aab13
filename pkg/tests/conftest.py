import contextlib
import io
import os

import pytest

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
GOLDEN = os.path.join(os.path.dirname(__file__), "golden")

# One line per release criterion, appended as the gate tests run and
# echoed after the run; capture would otherwise swallow them.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


def golden_path(name: str) -> str:
    return os.path.join(GOLDEN, name)


def read_file(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


@pytest.fixture
def run_cli():
    """Invoke the command line in process; returns (code, stdout, stderr)."""
    from sekg import cli

    def run(*argv):
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = cli.main(list(argv))
        return code, out.getvalue(), err.getvalue()

    return run
