import pytest

from services.command_runner import CommandRunner
from utils.polynomial import Polynomial
from utils.text_parser import parse_poly


@pytest.fixture
def one_var():
    """Parser bound to a single variable x."""
    return lambda text: parse_poly(text, 1)


@pytest.fixture
def two_var():
    """Parser bound to variables x, y."""
    return lambda text: parse_poly(text, 2)


@pytest.fixture
def x():
    return Polynomial.variable(0, 1)


@pytest.fixture
def runner():
    return CommandRunner()
