import pytest

from polyrew.diagram import GeneratorSym, Signature, TAU, parse_diagram
from polyrew.rewrite import Polygraph, Rule

MU = GeneratorSym("mu", 2, 1)
ETA = GeneratorSym("eta", 0, 1)


def make_mon_polygraph() -> Polygraph:
    sig = Signature("Mon", (MU, ETA))
    alpha = Rule(
        "alpha",
        parse_diagram("(mu * id 1) ; mu", sig),
        parse_diagram("(id 1 * mu) ; mu", sig),
    )
    lam = Rule(
        "lambda",
        parse_diagram("(eta * id 1) ; mu", sig),
        parse_diagram("id 1", sig),
    )
    rho = Rule(
        "rho",
        parse_diagram("(id 1 * eta) ; mu", sig),
        parse_diagram("id 1", sig),
    )
    return Polygraph(sig, (alpha, lam, rho))


def make_as_polygraph() -> Polygraph:
    sig = Signature("As", (MU,))
    alpha = Rule(
        "alpha",
        parse_diagram("(mu * id 1) ; mu", sig),
        parse_diagram("(id 1 * mu) ; mu", sig),
    )
    return Polygraph(sig, (alpha,))


@pytest.fixture(scope="session")
def mon_polygraph() -> Polygraph:
    return make_mon_polygraph()


@pytest.fixture(scope="session")
def as_polygraph() -> Polygraph:
    return make_as_polygraph()


@pytest.fixture(scope="session")
def mon_sig() -> Signature:
    return Signature("Mon", (MU, ETA))


@pytest.fixture(scope="session")
def as_sig() -> Signature:
    return Signature("As", (MU,))


@pytest.fixture(scope="session")
def prop_sig() -> Signature:
    return Signature("MonProp", (MU, ETA), is_prop=True)


@pytest.fixture(scope="session")
def tau():
    return TAU
