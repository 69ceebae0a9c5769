from importlib import resources

import pytest

from hsmc import formula as F
from hsmc.checker import kernels
from hsmc.core import KripkeStructure, parse_kripke

DATA = resources.files("hsmc") / "data"


def data_path(name: str) -> str:
    return str(DATA / name)


def read_formula(name: str) -> F.Formula:
    text = (DATA / name).read_text()
    return F.parse(" ".join(ln for ln in text.splitlines() if not ln.startswith("#")))


@pytest.fixture
def k2() -> KripkeStructure:
    return parse_kripke((DATA / "k2.kripke").read_text())


@pytest.fixture
def ksched() -> KripkeStructure:
    return parse_kripke((DATA / "ksched.kripke").read_text())


@pytest.fixture
def chain3() -> KripkeStructure:
    """a -> b -> c -> c, labels p / p,q / q."""
    return KripkeStructure.from_names(
        ["a", "b", "c"],
        [("a", "b"), ("b", "c"), ("c", "c")],
        {"a": ["p"], "b": ["p", "q"], "c": ["q"]},
        "a",
    )


@pytest.fixture(params=kernels.available_backends())
def kernel_backend(request):
    before = kernels.backend()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(before)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
