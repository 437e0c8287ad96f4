import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from emocirc.corpus import Document  # noqa: E402

T0 = datetime(2012, 10, 19, tzinfo=timezone.utc)


def make_doc(i, text="some text", emotion="happy", tz="London", seconds=None):
    return Document(
        id=f"d{i:05d}",
        text=text,
        emotion=emotion,
        timezone=tz,
        created_at=T0 + timedelta(seconds=i if seconds is None else seconds),
    )


@pytest.fixture
def doc_factory():
    return make_doc


# -- acceptance reporting ----------------------------------------------------

_criteria: dict[str, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion identifier")


def pytest_runtest_logreport(report):
    label = getattr(report, "criterion", None)
    if label is None:
        return
    entry = _criteria.setdefault(label, [])
    if report.when == "call" or report.outcome in ("failed", "skipped"):
        entry.append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_criteria):
        outcomes = _criteria[label]
        if "failed" in outcomes:
            status = "FAIL"
        elif outcomes and all(o == "skipped" for o in outcomes):
            status = "SKIP"
        else:
            status = "PASS"
        terminalreporter.write_line(f"{status}  {label}")
