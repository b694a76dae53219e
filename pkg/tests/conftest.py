from __future__ import annotations

from pathlib import Path

import pytest

from fixtures.repos import build_all

FIXTURES = Path(__file__).parent / "fixtures"
LINKS = FIXTURES / "links"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def repos(tmp_path_factory: pytest.TempPathFactory) -> dict[str, Path]:
    """Every scripted fixture repository, built once per session."""
    return build_all(tmp_path_factory.mktemp("repos"))


@pytest.fixture(scope="session")
def synthetic_ledger(repos):
    from doeimpact.history import ingest_repository

    return ingest_repository(repos["synthetic3"])


# -- acceptance summary ----------------------------------------------------------

_CRITERIA: dict[int, tuple[str, list[bool]]] = {}


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_logreport(report: pytest.TestReport) -> None:
    marker = report.user_properties and dict(report.user_properties).get("criterion")
    if not marker:
        return
    number, title = marker
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA.setdefault(number, (title, []))[1].append(report.outcome == "passed")


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item: pytest.Item) -> None:
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        item.user_properties.append(("criterion", tuple(mark.args)))


def pytest_terminal_summary(terminalreporter) -> None:
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcomes = _CRITERIA[number]
        verdict = "PASS" if outcomes and all(outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {verdict}  {title}")
