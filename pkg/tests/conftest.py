import pytest

from helpers import small_corpus

_VERDICTS = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def corpus():
    return small_corpus(60)


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line per acceptance criterion."""
    rows = request.config.stash.setdefault(_VERDICTS, [])

    def record(label: str, ok: bool, detail: str = "") -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip()
        rows.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    rows = config.stash.get(_VERDICTS, [])
    if rows:
        terminalreporter.section("acceptance criteria")
        for line in rows:
            terminalreporter.write_line(line)
