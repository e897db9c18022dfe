import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """12 plants-only frames at 60x60 with high soil red."""
    from cropfuse.synthgen import SceneParams, generate_dataset

    root = tmp_path_factory.mktemp("synth") / "tiny"
    p = SceneParams(width=60, height=60, row_count=2, row_width=12.0, noise_sigma=0.03,
                    red_soil=0.6, plants_only=True, seed=3)
    generate_dataset(p, 12, root)
    return root


_acceptance: dict = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _acceptance[name] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance, key=lambda n: int(n.split("_")[2])):
        outcome, duration = _acceptance[name]
        number = name.split("_")[2]
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {name}  ({duration:.1f}s)")
