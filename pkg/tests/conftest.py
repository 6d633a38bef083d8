import numpy as np
import pytest

from su2est.su2_model import channel_fisher, observable_frame, parse_family


@pytest.fixture(scope="session")
def pauli3():
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    fisher = channel_fisher(family)
    frame = observable_frame(fisher, family)
    return family, fisher, frame


@pytest.fixture(scope="session")
def pauli2():
    family = parse_family("pauli2", [0.0, 0.0])
    fisher = channel_fisher(family)
    frame = observable_frame(fisher, family)
    return family, fisher, frame


@pytest.fixture(scope="session")
def phase1():
    family = parse_family("phase1", [0.7])
    fisher = channel_fisher(family)
    frame = observable_frame(fisher, family)
    return family, fisher, frame


def random_orthogonal(rng, d):
    q, r = np.linalg.qr(rng.normal(size=(d, d)))
    return q * np.sign(np.diag(r))


def random_family(rng, d):
    """Generic d-parameter family with linearly independent generators."""
    from su2est.su2_model import UnitaryFamily
    from su2est.util import PAULI

    coeffs = rng.normal(size=(d, 3))
    gens = tuple(sum(c * s for c, s in zip(row, PAULI)) / 2 for row in coeffs)
    theta0 = rng.normal(size=d) * 0.5
    return UnitaryFamily(gens, theta0)
