import pytest

from seedsynth.circuit import QubitTopology
from seedsynth.templates import enumerate_templates


@pytest.fixture(scope="session")
def catalog():
    return enumerate_templates(3, 8)


@pytest.fixture(scope="session")
def line_catalog():
    # single line 0-1-2, the tree every oracle below reasons about
    return enumerate_templates(3, 8, [QubitTopology.line((0, 1, 2))])


@pytest.fixture(scope="session")
def two_qubit_catalog():
    return enumerate_templates(2, 3, [QubitTopology.line((0, 1))])
