import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from valring import (
    BadFamilyCombo,
    Element,
    ElementFilter,
    EvenPrime,
    NotAUnit,
    NonPrime,
    RingFamily,
    RingMismatch,
    TooLarge,
    make_ring,
)
from valring.ring import is_prime, smallest_irreducible


# ---------------------------------------------------------------------------
# construction and validation


def test_make_ring_rejects_bad_input():
    with pytest.raises(NonPrime):
        make_ring(6, 1, 2)
    with pytest.raises(EvenPrime):
        make_ring(2, 1, 3)
    with pytest.raises(BadFamilyCombo):
        make_ring(3, 2, 2, "zpr")
    with pytest.raises(ValueError):
        make_ring(3, 0, 2)
    with pytest.raises(ValueError):
        make_ring(3, 1, 0)
    with pytest.raises(TooLarge):
        make_ring(3, 1, 2, max_size=8)


def test_make_ring_is_cached():
    a = make_ring(5, 1, 2)
    b = make_ring(5, 1, 2)
    assert a is b
    c = make_ring(5, 1, 2, "zpr")
    assert a is c


@pytest.mark.parametrize(
    "p,s,r,family,size,units",
    [
        (3, 1, 1, "zpr", 3, 2),
        (3, 1, 2, "zpr", 9, 6),
        (3, 1, 3, "zpr", 27, 18),
        (5, 1, 2, "zpr", 25, 20),
        (7, 1, 2, "zpr", 49, 42),
        (3, 2, 1, "fqtr", 9, 8),
        (3, 2, 2, "fqtr", 81, 72),
        (5, 2, 1, "fqtr", 25, 24),
    ],
)
def test_cardinalities(p, s, r, family, size, units):
    ring = make_ring(p, s, r, family)
    assert ring.size == size
    assert ring.unit_count == units
    assert ring.size == ring.q**ring.r
    # ideal chain: |(z^k)| = q^(r-k)
    for k in range(r + 1):
        assert ring.ideal_size(k) == ring.q ** (r - k)


def test_descriptor_and_name(z9, f9t2):
    assert z9.descriptor == "z:3:2"
    assert f9t2.descriptor == "f:9:2"
    assert "9" in z9.math_name


def test_is_prime_small():
    primes = [n for n in range(2, 60) if is_prime(n)]
    assert primes == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]


# ---------------------------------------------------------------------------
# irreducible modulus selection (frozen against hand-checked values)


@pytest.mark.parametrize(
    "p,s,coeffs",
    [
        (3, 2, (1, 0, 1)),  # x^2 + 1, since -1 is not a square mod 3
        (5, 2, (2, 0, 1)),  # x^2 + 2
        (7, 2, (1, 0, 1)),
        (3, 3, (1, 2, 0, 1)),  # x^3 + 2x + 1 has no root in F_3
    ],
)
def test_smallest_irreducible(p, s, coeffs):
    assert smallest_irreducible(p, s) == coeffs


def test_irreducible_has_no_roots():
    # degree 2 and 3: irreducible iff rootless
    for p, s in [(3, 2), (5, 2), (3, 3)]:
        cs = smallest_irreducible(p, s)
        for x in range(p):
            val = sum(c * x**i for i, c in enumerate(cs)) % p
            assert val != 0


# ---------------------------------------------------------------------------
# arithmetic: Z/p^r is plain modular arithmetic


@given(st.integers(0, 48), st.integers(0, 48))
def test_zpr_matches_integers(a, b):
    ring = make_ring(7, 1, 2)
    assert ring.add(a, b) == (a + b) % 49
    assert ring.sub(a, b) == (a - b) % 49
    assert ring.mul(a, b) == (a * b) % 49
    assert ring.neg(a) == (-a) % 49


def test_zpr_inverse_table_matches_pow(z25):
    table = z25.inverse_table()
    for x in range(25):
        if x % 5 != 0:
            assert int(table[x]) == pow(x, -1, 25)
        else:
            assert int(table[x]) == 0


def test_z9_inverse_table_frozen(z9):
    assert list(z9.inverse_table()) == [0, 1, 5, 0, 7, 2, 0, 4, 8]


# ---------------------------------------------------------------------------
# arithmetic: F_q[t]/(t^r) ring axioms and characteristic


@given(st.tuples(st.integers(0, 80), st.integers(0, 80), st.integers(0, 80)))
def test_fqtr_ring_axioms(triple):
    ring = make_ring(3, 2, 2, "fqtr")
    a, b, c = triple
    assert ring.add(a, b) == ring.add(b, a)
    assert ring.mul(a, b) == ring.mul(b, a)
    assert ring.add(ring.add(a, b), c) == ring.add(a, ring.add(b, c))
    assert ring.mul(ring.mul(a, b), c) == ring.mul(a, ring.mul(b, c))
    left = ring.mul(a, ring.add(b, c))
    right = ring.add(ring.mul(a, b), ring.mul(a, c))
    assert left == right
    assert ring.add(a, ring.neg(a)) == 0
    assert ring.mul(a, ring.one.index) == a


def test_characteristic(z9, f9t2):
    # Z/9 has characteristic 9, F_9[t]/(t^2) has characteristic 3
    one = z9.one.index
    assert z9.add(z9.add(one, one), one) != 0
    fone = f9t2.one.index
    assert f9t2.add(f9t2.add(fone, fone), fone) == 0


def test_field_multiplication_oracle():
    # F_9 = F_3[x]/(x^2+1); elements a0 + a1*x with index a0 + 3*a1
    ring = make_ring(3, 2, 1, "fqtr")
    for a in range(9):
        for b in range(9):
            a0, a1 = a % 3, a // 3
            b0, b1 = b % 3, b // 3
            # (a0 + a1 x)(b0 + b1 x) mod (x^2 + 1), so x^2 = -1
            c0 = (a0 * b0 - a1 * b1) % 3
            c1 = (a0 * b1 + a1 * b0) % 3
            assert ring.mul(a, b) == c0 + 3 * c1


def test_fqtr_uniformizer_nilpotent(f9t2):
    t = f9t2.uniformizer.index
    assert f9t2.valuation(t) == 1
    assert f9t2.mul(t, t) == 0
    # t * (a0 + a1 t) = a0 t, killing the top coefficient
    assert f9t2.mul(t, f9t2.from_coeffs([2, 5])) == f9t2.from_coeffs([0, 2])


# ---------------------------------------------------------------------------
# valuation, units, inverses


@pytest.mark.parametrize("maker", [(3, 1, 3, "zpr"), (3, 2, 2, "fqtr")])
def test_valuation_level_counts(maker):
    ring = make_ring(*maker)
    vals = ring.valuation_many(np.arange(ring.size))
    assert int(vals[0]) == ring.r
    for k in range(ring.r + 1):
        assert int((vals >= k).sum()) == ring.ideal_size(k)
    # scalar route agrees
    for x in range(0, ring.size, 7):
        assert ring.valuation(x) == int(vals[x])


@pytest.mark.parametrize("maker", [(5, 1, 2, "zpr"), (3, 2, 2, "fqtr")])
def test_inverse_on_units(maker):
    ring = make_ring(*maker)
    for x in ring.indices(ElementFilter.UNITS):
        assert ring.mul(int(x), ring.inv(int(x))) == ring.one.index
    with pytest.raises(NotAUnit):
        ring.inv(0)
    with pytest.raises(NotAUnit):
        ring.inv(ring.uniformizer.index)


def test_unit_iff_valuation_zero(z25):
    for x in range(25):
        assert z25.is_unit(x) == (z25.valuation(x) == 0)


def test_uniformizer_power_chain():
    ring = make_ring(3, 1, 3)
    z = ring.uniformizer.index
    assert z == 3
    zz = ring.mul(z, z)
    assert ring.valuation(zz) == 2
    assert ring.mul(zz, z) == 0


# ---------------------------------------------------------------------------
# enumeration filters and coefficient encoding


@pytest.mark.parametrize("maker", [(3, 1, 2, "zpr"), (3, 2, 2, "fqtr")])
def test_filters_partition(maker):
    ring = make_ring(*maker)
    every = set(int(i) for i in ring.indices(ElementFilter.ALL))
    units = set(int(i) for i in ring.indices(ElementFilter.UNITS))
    ideal = set(int(i) for i in ring.indices(ElementFilter.MAXIMAL_IDEAL))
    assert every == set(range(ring.size))
    assert units | ideal == every
    assert units & ideal == set()
    assert len(units) == ring.unit_count


@given(st.integers(0, 80))
def test_coeffs_roundtrip(idx):
    ring = make_ring(3, 2, 2, "fqtr")
    cs = ring.coeffs(idx)
    assert len(cs) == ring.r
    assert all(0 <= c < ring.q for c in cs)
    assert ring.from_coeffs(cs) == idx


def test_from_int(z9, f9t2):
    assert z9.from_int(10) == 1
    assert z9.from_int(-1) == 8
    # FQTR: integers land in the prime subring, reduced mod p
    assert f9t2.from_int(3) == 0
    assert f9t2.from_int(4) == 1


# ---------------------------------------------------------------------------
# Element wrapper


def test_element_operators(z9):
    a = z9.element(2)
    b = z9.element(5)
    assert (a + b).index == 7
    assert (a * b).index == 1
    assert (a - b).index == 6
    assert (-a).index == 7
    assert a.inverse().index == 5
    assert a.is_unit
    assert z9.element(3).valuation == 1


def test_element_ring_mismatch(z9, z25):
    with pytest.raises(RingMismatch):
        _ = z9.element(1) + z25.element(1)


def test_element_is_hashable(z9):
    seen = {z9.element(1), z9.element(1), z9.element(2)}
    assert len(seen) == 2
    assert Element(z9, 1) in seen
