import numpy as np
import pytest
from hypothesis import settings

from bcmap import kernels

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

BACKEND_NAMES = sorted(kernels.BACKENDS)


@pytest.fixture(params=BACKEND_NAMES)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_CRITERIA = pytest.StashKey[dict]()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    number, title = mark.args
    if hasattr(rep, "wasxfail"):
        status = "FAIL (expected: " + rep.wasxfail + ")"
    else:
        status = "PASS" if rep.passed else "FAIL"
    detail = dict(item.user_properties).get("detail", "")
    item.config.stash.setdefault(_CRITERIA, {})[number] = (title, status, rep.duration, detail)


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_CRITERIA, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, status, duration, detail = results[number]
        line = f"criterion {number:2d} {status.split(' ')[0]:4s} {title} ({duration:.2f} s)"
        if detail:
            line += f" [{detail}]"
        if status != "PASS" and "expected" in status:
            line += " " + status[5:]
        terminalreporter.write_line(line)
