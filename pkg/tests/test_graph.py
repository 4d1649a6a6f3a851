import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from valring import (
    AllNonUnits,
    BadIndex,
    DEFAULT_CAPS,
    ElementSet,
    TooLarge,
    TooLargeForSpectrum,
    build_graph,
    canonicalize,
    canonicalize_rows,
    class_count,
    class_degree,
    count_form_solutions,
    edge_count,
    embed_energy_sets,
    embed_solution_sets,
    enumerate_classes,
    form_energy,
    lambda3_bound,
    make_ring,
    mixing_check,
    mixing_random_pairs,
    pair_edge_count,
    sample_unit_subset,
    spectrum,
)


# ---------------------------------------------------------------------------
# closed-form counts, frozen


@pytest.mark.parametrize(
    "maker,d,n_cls,deg",
    [
        ((3, 1, 1, "zpr"), 2, 4, 1),
        ((3, 1, 1, "zpr"), 3, 13, 4),
        ((3, 1, 1, "zpr"), 4, 40, 13),
        ((3, 1, 2, "zpr"), 2, 12, 1),
        ((3, 1, 2, "zpr"), 3, 117, 12),
        ((3, 1, 2, "zpr"), 4, 1080, 117),
        ((5, 1, 2, "zpr"), 3, 775, 30),
        ((5, 1, 2, "zpr"), 4, 19500, 775),
        ((3, 2, 1, "fqtr"), 3, 91, 10),
        ((3, 2, 2, "fqtr"), 2, 90, 1),
        ((3, 2, 2, "fqtr"), 3, 7371, 90),
    ],
)
def test_class_count_and_degree(maker, d, n_cls, deg):
    ring = make_ring(*maker)
    assert class_count(ring, d) == n_cls
    assert class_degree(ring, d) == deg


def test_orbit_counting_oracle(z9):
    # brute force: vectors with a unit coordinate fall in orbits of size |R*|
    d = 2
    valid = [
        v
        for v in itertools.product(range(9), repeat=d)
        if any(z9.is_unit(c) for c in v)
    ]
    assert len(valid) == 72
    orbits = {canonicalize(z9, v) for v in valid}
    assert len(orbits) == 12 == class_count(z9, d)
    # every orbit has exactly unit_count members
    sizes = {}
    for v in valid:
        sizes[canonicalize(z9, v)] = sizes.get(canonicalize(z9, v), 0) + 1
    assert set(sizes.values()) == {6}


@pytest.mark.parametrize(
    "maker,d,lam",
    [
        ((3, 1, 1, "zpr"), 3, 3**0.5),
        ((3, 1, 2, "zpr"), 3, 27**0.5),
        ((3, 1, 2, "zpr"), 4, 27.0),
        ((5, 1, 2, "zpr"), 3, 125**0.5),
    ],
)
def test_lambda3_bound_frozen(maker, d, lam):
    assert lambda3_bound(make_ring(*maker), d) == pytest.approx(lam, rel=1e-12)


# ---------------------------------------------------------------------------
# canonical representatives


def test_canonicalize_scalar(z9):
    assert canonicalize(z9, (2, 4, 6)) == (1, 2, 3)
    assert canonicalize(z9, (3, 2, 0)) == (6, 1, 0)
    assert canonicalize(z9, (0, 3, 5)) == (0, 6, 1)
    with pytest.raises(AllNonUnits):
        canonicalize(z9, (0, 3, 6))


@given(st.integers(1, 8), st.lists(st.integers(0, 8), min_size=3, max_size=3))
def test_canonicalize_is_scale_invariant(u, vec):
    ring = make_ring(3, 1, 2)
    if not ring.is_unit(u) or not any(ring.is_unit(c) for c in vec):
        return
    scaled = [ring.mul(u, c) for c in vec]
    assert canonicalize(ring, scaled) == canonicalize(ring, vec)
    rep = canonicalize(ring, vec)
    assert canonicalize(ring, rep) == rep


def test_canonicalize_rows_matches_scalar(f9t2):
    rows = []
    for v in itertools.product(range(0, 81, 7), repeat=2):
        if any(f9t2.is_unit(c) for c in v):
            rows.append(v)
    rows = np.array(rows, dtype=np.int64)
    out = canonicalize_rows(f9t2, rows)
    for r_in, r_out in zip(rows, out):
        assert tuple(int(c) for c in r_out) == canonicalize(f9t2, tuple(int(c) for c in r_in))


def test_enumerate_classes_frozen_f3():
    ring = make_ring(3, 1, 1)
    rows = enumerate_classes(ring, 2)
    assert rows.tolist() == [[0, 1], [1, 0], [1, 1], [1, 2]]
    assert not rows.flags.writeable


def test_enumerate_classes_properties(z9):
    rows = enumerate_classes(z9, 3)
    assert len(rows) == 117
    # rows unique, canonical, lex sorted
    assert len(np.unique(rows, axis=0)) == 117
    again = canonicalize_rows(z9, rows)
    assert np.array_equal(again, rows)
    order = np.lexsort(rows[:, ::-1].T)
    assert np.array_equal(order, np.arange(117))


def test_enumerate_classes_cap(z9):
    with pytest.raises(TooLarge):
        enumerate_classes(z9, 3, max_classes=100)


# ---------------------------------------------------------------------------
# dense graph


def test_build_graph_basic(z9):
    g = build_graph(z9, 3)
    assert g.n_classes == 117
    assert g.degree == 12
    m = g.biadjacency
    assert m.shape == (117, 117)
    assert np.array_equal(m, m.T)
    assert (m.sum(axis=1) == 12).all()
    assert (m.sum(axis=0) == 12).all()


def test_build_graph_is_cached(z9):
    assert build_graph(z9, 3) is build_graph(z9, 3)


def test_build_graph_cap(f9t2):
    with pytest.raises(TooLarge):
        build_graph(f9t2, 3)  # 7371 classes


def test_index_of_roundtrip(z9):
    g = build_graph(z9, 3)
    assert np.array_equal(g.index_of(g.classes), np.arange(117))
    with pytest.raises(BadIndex):
        g.index_of(np.array([[2, 0, 0]]))  # not canonical, absent


def test_spectrum_frozen_f3():
    g = build_graph(make_ring(3, 1, 1), 3)
    sv = spectrum(g)
    assert sv[0] == pytest.approx(4.0, abs=1e-9)
    assert sv[1] == pytest.approx(3**0.5, abs=1e-9)
    assert sv[1] <= lambda3_bound(g.ring, 3) + 1e-6


def test_spectrum_frozen_z9(z9):
    sv = spectrum(build_graph(z9, 3))
    assert sv[0] == pytest.approx(12.0, abs=1e-8)
    assert sv[1] == pytest.approx(27**0.5, abs=1e-8)


def test_spectrum_cap(z9):
    with pytest.raises(TooLargeForSpectrum):
        spectrum(build_graph(z9, 3), spectral_cap=10)


def test_edge_count_identities(z9):
    g = build_graph(z9, 3)
    every = range(g.n_classes)
    assert edge_count(g, every, every) == g.n_classes * g.degree
    assert edge_count(g, [0, 1, 2], every) == 3 * g.degree
    assert edge_count(g, [], every) == 0
    with pytest.raises(BadIndex):
        edge_count(g, [0, 200], [1])


def test_pair_edge_count_matches_graph(z9):
    g = build_graph(z9, 3)
    rng = np.random.default_rng(7)
    li = rng.choice(g.n_classes, size=40, replace=False)
    ri = rng.choice(g.n_classes, size=25, replace=False)
    direct = pair_edge_count(z9, g.classes[np.sort(li)], g.classes[np.sort(ri)])
    assert direct == edge_count(g, li, ri)


def test_pair_edge_count_cap(z9):
    g = build_graph(z9, 3)
    with pytest.raises(TooLarge):
        pair_edge_count(z9, g.classes, g.classes, DEFAULT_CAPS.with_(max_pair_count=100))


# ---------------------------------------------------------------------------
# mixing


def test_mixing_check_report(z9):
    g = build_graph(z9, 3)
    rep = mixing_check(g, range(20), range(40, 80))
    assert rep["passes"]
    assert rep["lambda3_kind"] == "computed"
    assert rep["edges"] >= 0
    assert rep["residual"] <= rep["bound"] + 1e-6
    # a supplied lambda3 wins over the computed one
    rep2 = mixing_check(g, range(20), range(40, 80), lambda3=99.0)
    assert rep2["lambda3_kind"] == "given"
    assert rep2["bound"] > rep["bound"]


@pytest.mark.parametrize("maker,d", [((3, 1, 2, "zpr"), 3), ((3, 2, 1, "fqtr"), 3)])
def test_mixing_random_pairs_no_violations(maker, d):
    g = build_graph(make_ring(*maker), d)
    rep = mixing_random_pairs(g, 200, seed=5)
    assert rep["violations"] == 0
    assert 0.0 <= rep["mean_ratio"] <= rep["max_ratio"] <= 1.0 + 1e-9


def test_mixing_random_pairs_deterministic(z9):
    g = build_graph(z9, 3)
    a = mixing_random_pairs(g, 50, seed=11)
    b = mixing_random_pairs(g, 50, seed=11)
    assert a == b


# ---------------------------------------------------------------------------
# statistic-preserving embeddings


def test_embed_solution_sets_frozen(z9):
    a = ElementSet.from_indices(z9, [1, 2])
    emb = embed_solution_sets(a, 2)
    assert emb.audit == "ok"
    assert emb.d == 3
    assert emb.u_count == 6 and emb.v_count == 6
    g = build_graph(z9, 3)
    e = edge_count(g, g.index_of(emb.u_rows), g.index_of(emb.v_rows))
    assert e == count_form_solutions(a, 2) == 8
    # direct pairwise route agrees with the dense graph
    assert pair_edge_count(z9, emb.u_rows, emb.v_rows) == 8


def test_embed_energy_sets_frozen(z9):
    a = ElementSet.from_indices(z9, [1, 2])
    emb = embed_energy_sets(a, 2)
    assert emb.audit == "ok"
    assert emb.d == 4
    assert emb.u_count == emb.v_count == 12
    assert pair_edge_count(z9, emb.u_rows, emb.v_rows) == form_energy(a, 2) == 32
    g = build_graph(z9, 4)
    e = edge_count(g, g.index_of(emb.u_rows), g.index_of(emb.v_rows))
    assert e == 32


@pytest.mark.parametrize("maker", [(3, 1, 2, "zpr"), (3, 2, 1, "fqtr"), (5, 1, 2, "zpr")])
def test_embeddings_reproduce_counts(maker):
    ring = make_ring(*maker)
    for seed in (1, 2, 3):
        a = sample_unit_subset(ring, min(5, ring.unit_count), seed)
        emb = embed_solution_sets(a, 2)
        assert emb.audit == "ok"
        assert pair_edge_count(ring, emb.u_rows, emb.v_rows) == count_form_solutions(a, 2)
        emb2 = embed_energy_sets(a, 2)
        assert pair_edge_count(ring, emb2.u_rows, emb2.v_rows) == form_energy(a, 2)


def test_embed_skip_mode(z9):
    a = ElementSet.from_indices(z9, [1, 2])
    emb = embed_solution_sets(a, 2, DEFAULT_CAPS.with_(max_embed_size=1))
    assert emb.audit == "skipped"
    assert emb.u_rows is None and emb.v_rows is None
    assert emb.u_count == 6  # counts still reported for the bound-only route
