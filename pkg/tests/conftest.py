import pytest

from formring.formparam import all_form_rings
from formring.ring import make_ring

BASE_SPECS = [
    "GF 2, trivial, lambda=1",
    "GF 3, trivial, lambda=1",
    "Zmod 4, trivial, lambda=1",
    "Zmod 6, trivial, lambda=1",
    "GaussMod 3, trivial, lambda=1",
    "GaussMod 3, conj, lambda=1",
]


def form_ring_grid():
    """(ring, param) for every admissible lambda / Lambda on the base rings."""
    out = []
    for spec in BASE_SPECS:
        out.extend(all_form_rings(make_ring(spec)))
    return out


def grid_id(item):
    R, param = item
    return f"{R.description}|{param.labels}"


@pytest.fixture(scope="session")
def grid():
    return form_ring_grid()


@pytest.fixture
def z6():
    return make_ring("Zmod 6, trivial, lambda=1")
