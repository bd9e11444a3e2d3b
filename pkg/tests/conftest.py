import numpy as np
import pytest

from discrete_poisson.geometry import DomainBox, Kind, Tessellation, extract_contacts, generate

KINDS = ["voronoi", "rand-voronoi", "random", "centered"]


@pytest.fixture(scope="session")
def small_box():
    return DomainBox.from_size(15.0, 15.0)


@pytest.fixture(scope="session")
def structures(small_box):
    """One small tessellation of each kind, with its contacts."""
    out = {}
    for kind in KINDS:
        t = generate(kind, small_box, 1.0, 7)
        out[kind] = (t, extract_contacts(t))
    return out


@pytest.fixture(params=KINDS)
def structure(request, structures):
    return structures[request.param]


@pytest.fixture
def two_squares():
    """Two unit squares side by side with nodes at their centres."""
    vertices = np.array([[0, 0], [1, 0], [2, 0], [2, 1], [1, 1], [0, 1]], dtype=float)
    bodies = [[np.array([0, 1, 4, 5])], [np.array([1, 2, 3, 4])]]
    nodes = np.array([[0.5, 0.5], [1.5, 0.5]])
    t = Tessellation(DomainBox.from_size(2.0, 1.0), nodes, vertices, bodies, Kind.VORONOI, None, 1.0)
    return t, extract_contacts(t)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
