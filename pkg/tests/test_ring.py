import math
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from formring.errors import NilpotentElement, NotACover, RingSpecError
from formring.ring import (ideal_elements, ideal_witness, localize_at, make_ring,
                           maximal_ideals, partition_of_unity)

from conftest import BASE_SPECS

ALL_RINGS = [make_ring(s) for s in BASE_SPECS] + [make_ring("Zmod 12, trivial, lambda=1")]


def test_spec_parsing():
    R = make_ring("Zmod 6, trivial, lambda=-1")
    assert R.size == 6 and R.lam == 5
    G = make_ring("GaussMod 3, conj, lambda=1")
    assert G.size == 9
    for a in G.elements:
        x, y = G.label(a)
        assert list(G.label(G.conj(a))) == [x, (-y) % 3]


@pytest.mark.parametrize("spec", [
    "Zmod 6, trivial, lambda=2",
    "Zmod 6, trivial",
    "GF 4, trivial, lambda=1",
    "Zmod 6, conj, lambda=1",
    "Foo 3, trivial, lambda=1",
])
def test_bad_specs(spec):
    with pytest.raises(RingSpecError):
        make_ring(spec)


@pytest.mark.parametrize("R", ALL_RINGS, ids=lambda r: r.description)
def test_ring_axioms_exhaustive(R):
    els = list(R.elements)
    for a, b in product(els, els):
        assert R.add(a, b) == R.add(b, a)
        assert R.mul(a, b) == R.mul(b, a)
        assert R.conj(R.add(a, b)) == R.add(R.conj(a), R.conj(b))
        assert R.conj(R.mul(a, b)) == R.mul(R.conj(a), R.conj(b))
    for a in els:
        assert R.conj(R.conj(a)) == a
        assert R.mul(a, R.one) == a
        assert R.add(a, R.neg(a)) == R.zero
    assert R.mul(R.lam, R.conj(R.lam)) == R.one


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(ALL_RINGS), st.data())
def test_distributive_and_associative(R, data):
    a, b, c = (data.draw(st.integers(0, R.size - 1)) for _ in range(3))
    assert R.mul(a, R.add(b, c)) == R.add(R.mul(a, b), R.mul(a, c))
    assert R.mul(R.mul(a, b), c) == R.mul(a, R.mul(b, c))


def _zmod_local_size(n, s):
    # keep the primary components of n where s is a unit
    size = 1
    m = n
    p = 2
    while m > 1:
        if m % p == 0:
            q = 1
            while m % p == 0:
                m //= p
                q *= p
            if s % p:
                size *= q
        p += 1
    return size


@pytest.mark.parametrize("n,s", [(6, 2), (6, 3), (6, 1), (6, 5), (12, 2), (12, 3), (12, 9),
                                 (4, 1), (4, 3), (5, 2)])
def test_localize_zmod_against_crt(n, s):
    R = make_ring(f"Zmod {n}, trivial, lambda=1")
    loc = localize_at(R, s)
    assert loc.target.size == _zmod_local_size(n, s)
    # kernel is the s-power torsion
    torsion = {a for a in range(n) if any((s ** k * a) % n == 0 for k in range(n + 1))}
    assert set(loc.kernel) == torsion
    assert loc.target.is_unit(loc(s))
    for a, b in product(range(n), range(n)):
        assert loc(R.mul(a, b)) == loc.target.mul(loc(a), loc(b))
        assert loc(R.add(a, b)) == loc.target.add(loc(a), loc(b))


def test_localize_examples():
    R = make_ring("Zmod 6, trivial, lambda=1")
    loc3 = localize_at(R, 3)
    assert loc3.target.size == 2 and loc3(3) == loc3.target.one and loc3.e == 3
    loc2 = localize_at(R, 2)
    assert loc2.target.size == 3 and loc2.e == 4
    with pytest.raises(NilpotentElement):
        localize_at(make_ring("Zmod 4, trivial, lambda=1"), 2)


@pytest.mark.parametrize("R", ALL_RINGS, ids=lambda r: r.description)
def test_localization_kernel_exhaustive(R):
    for s in R.elements:
        if R.is_nilpotent(s):
            with pytest.raises(NilpotentElement):
                localize_at(R, s)
            continue
        loc = localize_at(R, s)
        assert loc.target.is_unit(loc(s))
        tors = {a for a in R.elements if any(R.mul(R.pow(s, k), a) == R.zero
                                              for k in range(R.size + 1))}
        assert set(loc.kernel) == tors


def test_maximal_ideals():
    def gens(R):
        return sorted(sorted(m.elements) for m in maximal_ideals(R))
    assert gens(make_ring("Zmod 6, trivial, lambda=1")) == [[0, 2, 4], [0, 3]]
    assert gens(make_ring("GF 2, trivial, lambda=1")) == [[0]]
    assert gens(make_ring("Zmod 4, trivial, lambda=1")) == [[0, 2]]


def test_partition_of_unity_examples():
    R = make_ring("Zmod 6, trivial, lambda=1")
    assert partition_of_unity(R, [2, 3], 2) == [4, 3]
    assert partition_of_unity(R, [1], 5) == [1]
    with pytest.raises(NotACover):
        partition_of_unity(make_ring("Zmod 4, trivial, lambda=1"), [2], 2)
    with pytest.raises(NotACover):
        partition_of_unity(R, [2], 1)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([6, 10, 12, 15, 30]), st.integers(1, 4), st.data())
def test_partition_of_unity_reverifies(n, l, data):
    R = make_ring(f"Zmod {n}, trivial, lambda=1")
    cover = data.draw(st.lists(st.integers(1, n - 1), min_size=1, max_size=3))
    coprime = math.gcd(n, *[pow(s, l, n) for s in cover]) == 1
    if not coprime:
        with pytest.raises(NotACover):
            partition_of_unity(R, cover, l)
        return
    bs = partition_of_unity(R, cover, l)
    assert R.sum(bs) == R.one
    for s, b in zip(cover, bs):
        c = ideal_witness(R, R.pow(s, l), b)
        assert R.mul(R.pow(s, l), c) == b


def test_ideal_elements():
    R = make_ring("Zmod 12, trivial, lambda=1")
    assert ideal_elements(R, [8]) == frozenset({0, 4, 8})
    assert ideal_elements(R, [4, 6]) == frozenset({0, 2, 4, 6, 8, 10})
