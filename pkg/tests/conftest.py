import random
from pathlib import Path

import pytest

from cliquefusion.fusion import ColoredGraph
from cliquefusion.model import load_document

FIXTURES = Path(__file__).parent / "fixtures"
WORKED_EXAMPLE = FIXTURES / "worked_example.json"

# function rows of the worked example, kept apart from the fixture file
FUNCTION_ROWS = {
    "f1": {"s1", "s3", "s5", "s8"},
    "f2": {"s2", "s3", "s4", "s6"},
    "f3": {"s5", "s6", "s7"},
    "f4": {"s1", "s5"},
    "f5": {"s5", "s6", "s8"},
}
BASE_STATES = {"s1": 2, "s2": 4, "s3": 1, "s4": 4, "s5": 1, "s6": 1, "s7": 3, "s8": 4}


@pytest.fixture(scope="session")
def example_doc():
    return load_document(WORKED_EXAMPLE.read_text())


@pytest.fixture(scope="session")
def example_model(example_doc):
    return example_doc.model


@pytest.fixture(scope="session")
def example_scenario(example_doc):
    return example_doc.scenario


def random_graph(rng: random.Random, n: int, p: float = 0.5, levels: int = 4) -> ColoredGraph:
    names = [f"v{i:02d}" for i in range(n)]
    colors = {v: rng.randint(1, levels) for v in names}
    edges = [(a, b) for i, a in enumerate(names) for b in names[i + 1:] if rng.random() < p]
    return ColoredGraph.build(colors, edges, levels)


_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" in report.nodeid and "::test_criterion_" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        if report.when == "call" or report.outcome == "failed":
            _acceptance[name] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance, key=lambda n: int(n.split("_")[2])):
        terminalreporter.write_line(f"{_acceptance[name]}  {name}")
