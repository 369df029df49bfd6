import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from ffproj.errors import GuardExceededError, InvalidInputError
from ffproj.fpcore import coords_table, decode_point, encode_point
from ffproj.grassmann import (
    AffinePlane,
    Subspace,
    contains,
    coset_codes,
    coset_of,
    dual,
    enumerate_block,
    enumerate_subspaces,
    format_subspace,
    gaussian_binomial,
    parse_subspace,
    pivot_blocks,
)


def as_set(v):
    return frozenset(decode_point(int(i), v.p, v.n) for i in v.points())


def test_gaussian_binomial_examples():
    for n in range(5):
        assert gaussian_binomial(n, 0, 7) == 1
    assert gaussian_binomial(2, 1, 2) == 3
    assert gaussian_binomial(3, 1, 3) == 13
    assert [len(layer) for layer in oracles.all_subspaces(3, 3)] == [1, 13, 13, 1]
    with pytest.raises(InvalidInputError):
        gaussian_binomial(2, 3, 3)


def test_enumerate_examples():
    lines = list(enumerate_subspaces(2, 2, 1))
    assert {as_set(v) for v in lines} == {
        oracles.span([(1, 0)], 2, 2), oracles.span([(0, 1)], 2, 2), oracles.span([(1, 1)], 2, 2)
    }
    assert [format_subspace(v) for v in lines] == ["1,0", "1,1", "0,1"]
    assert list(enumerate_subspaces(3, 3, 3)) == [Subspace.full(3, 3)]
    assert len(list(enumerate_subspaces(3, 2, 1))) == 4


def test_enumerate_guard(monkeypatch):
    monkeypatch.setenv("FFPROJ_MAX_POINTS", "8")
    with pytest.raises(GuardExceededError, match="instance too large"):
        list(enumerate_subspaces(3, 2, 1))
    assert len(list(enumerate_subspaces(3, 2, 1, override=True))) == 4


@pytest.mark.parametrize("p,n", [(2, 3), (3, 3), (2, 4), (5, 2)])
def test_enumeration_matches_brute_force(p, n):
    layers = oracles.all_subspaces(p, n)
    for k in range(n + 1):
        got = [as_set(v) for v in enumerate_subspaces(p, n, k)]
        assert len(got) == len(set(got)) == gaussian_binomial(n, k, p)
        assert set(got) == layers[k]


def test_block_partition_merges_to_full_stream():
    p, n, k = 3, 4, 2
    merged = [v for piv in pivot_blocks(n, k) for v in enumerate_block(p, n, piv)]
    assert merged == list(enumerate_subspaces(p, n, k))
    shuffled = [v for piv in reversed(pivot_blocks(n, k)) for v in enumerate_block(p, n, piv)]
    assert set(shuffled) == set(merged)


def test_dual_examples():
    assert dual(Subspace.full(3, 2)) == Subspace.zero(3, 2)
    assert dual(Subspace.zero(3, 2)) == Subspace.full(3, 2)
    v = Subspace.from_rows([(1, 0)], 3, 2)
    assert dual(v) == Subspace.from_rows([(0, 1)], 3, 2)
    assert oracles.character_support(as_set(v), 3, 2) == as_set(dual(v))


def test_contains_examples():
    v = Subspace.from_rows([(1, 0)], 3, 2)
    w = Subspace.from_rows([(0, 1)], 3, 2)
    assert contains(v, v)
    assert contains(Subspace.full(3, 2), v)
    assert not contains(v, w)
    with pytest.raises(InvalidInputError):
        contains(v, Subspace.full(3, 3))
    with pytest.raises(InvalidInputError):
        contains(v, Subspace.full(5, 2))


def test_coset_examples():
    v = Subspace.from_rows([(1, 0)], 3, 2)
    for x in v.points():
        assert coset_of(v, int(x)) == AffinePlane(v, 0)
    w = coset_of(v, encode_point((2, 1), 3, 2))
    assert w.rep_coords == (0, 1)
    assert coset_of(v, (2, 1)) == w
    assert {coset_of(v, x) for x in range(9)} == {AffinePlane(v, encode_point((0, y), 3, 2)) for y in range(3)}


def test_format_parse_roundtrip():
    for v in enumerate_subspaces(3, 3, 2):
        assert parse_subspace(format_subspace(v), 3, 3) == v
    assert parse_subspace("", 3, 3) == Subspace.zero(3, 3)
    assert parse_subspace("2,4", 5, 2) == Subspace.from_rows([(1, 2)], 5, 2)
    with pytest.raises(InvalidInputError):
        parse_subspace("1,0", 3, 3)


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (3, 4)])
def test_dual_involution_and_bijection(p, n):
    for k in range(n + 1):
        family = list(enumerate_subspaces(p, n, k))
        duals = [dual(v) for v in family]
        assert all(d.k == n - k for d in duals)
        assert len(set(duals)) == len(family)
        for v, d in zip(family, duals):
            assert dual(d) == v
            pts = [decode_point(int(i), p, n) for i in v.points()]
            for xi in d.points():
                xi = decode_point(int(xi), p, n)
                assert all(oracles.dot(x, xi, p) == 0 for x in pts)


def test_containment_duality_p2_n4():
    p, n = 2, 4
    everything = [v for k in range(n + 1) for v in enumerate_subspaces(p, n, k)]
    duals = {v: dual(v) for v in everything}
    sets = {v: as_set(v) for v in everything}
    for w in everything:
        for v in everything:
            c = contains(w, v)
            assert c == sets[v].issubset(sets[w])
            assert c == contains(duals[v], duals[w])


@pytest.mark.parametrize("p,n,k", [(3, 3, 1), (3, 3, 2), (5, 2, 1), (2, 4, 2)])
def test_coset_partition(p, n, k):
    allpts = np.arange(p**n)
    coords = coords_table(p, n)
    for v in enumerate_subspaces(p, n, k):
        codes = coset_codes(v, coords)
        assert codes.min() >= 0 and codes.max() < p ** (n - k)
        assert np.array_equal(np.bincount(codes, minlength=p ** (n - k)), np.full(p ** (n - k), p**k))
        reps = {}
        for x in allpts:
            reps.setdefault(coset_of(v, int(x)), []).append(int(x))
        assert len(reps) == p ** (n - k)
        vset = as_set(v)
        for plane, members in reps.items():
            assert set(members) == set(plane.points().tolist())
            x0 = decode_point(members[0], p, n)
            assert all(oracles.sub(decode_point(y, p, n), x0, p) in vset for y in members)


@settings(max_examples=200, deadline=None)
@given(
    st.sampled_from([2, 3, 5]),
    st.integers(1, 3),
    st.data(),
)
def test_coset_relation(p, n, data):
    rows = data.draw(st.lists(st.tuples(*[st.integers(0, p - 1)] * n), max_size=n))
    v = Subspace.from_rows(rows, p, n) if rows else Subspace.zero(p, n)
    x = data.draw(st.integers(0, p**n - 1))
    y = data.draw(st.integers(0, p**n - 1))
    diff = oracles.sub(decode_point(x, p, n), decode_point(y, p, n), p)
    assert (coset_of(v, x) == coset_of(v, y)) == (diff in as_set(v))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 4), st.data())
def test_from_rows_is_canonical(p, n, data):
    rows = data.draw(st.lists(st.tuples(*[st.integers(0, p - 1)] * n), min_size=1, max_size=3))
    v = Subspace.from_rows(rows, p, n)
    perm = data.draw(st.permutations(rows))
    scaled = [tuple(c * (i % (p - 1) + 1) % p for c in r) for i, r in enumerate(perm)] if p > 2 else perm
    assert Subspace.from_rows(scaled, p, n) == v
    if p**n <= 625:
        assert as_set(v) == oracles.span(rows, p, n)


def test_image_under_invertible_map():
    p, n = 3, 3
    t = np.array([[1, 1, 0], [0, 1, 2], [1, 0, 1]])
    for v in itertools.chain(enumerate_subspaces(p, n, 1), enumerate_subspaces(p, n, 2)):
        img = v.image(t)
        want = {tuple(int(c) for c in t @ np.array(x) % p) for x in as_set(v)}
        assert as_set(img) == want
