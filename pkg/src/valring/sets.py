"""Subsets of a ring and the counting statistics defined on them.

An :class:`ElementSet` stores a subset of element indices as a single
Python integer bitmask (bit i set <=> index i belongs), which makes
equality, hashing, intersection, and membership O(1)-ish and keeps the
numpy index array as a lazy cache for the vectorized paths.

The statistics both count tuples (x, b_1..b_{n-1}, c_1..c_{n-1}) drawn
from A^2 x (A+A)^{n-1} x A^{n-1} and fold them through

    value = x + sum_i (b_i - c_i)**2 .

``count_form_solutions`` counts tuples whose value lands in the n-fold
sumset of A^2 (a membership test per tuple), ``form_energy`` is the sum
of squared multiplicities of all values, and the full histogram is
exposed for consistency checks between the two.
"""

from __future__ import annotations

import random
from typing import Iterable, Iterator, Union

import numpy as np

from .config import Caps, DEFAULT_CAPS
from .errors import BadArity, BadIndex, BadSize, NotUnits, RingMismatch, TooLarge
from .ring import Element, ElementFilter, Ring

__all__ = [
    "ElementSet",
    "sumset",
    "productset",
    "square_set",
    "iterated_sumset",
    "restrict_to_units",
    "count_form_solutions",
    "form_energy",
    "form_value_histogram",
    "form_tuple_count",
    "triple_product_sizes",
    "sample_unit_subset",
]


class ElementSet:
    """Immutable subset of one ring's elements."""

    __slots__ = ("ring", "bits", "_indices", "_mask")

    def __init__(self, ring: Ring, bits: int):
        if bits < 0 or bits >> ring.size:
            raise BadIndex(f"bitmask has bits outside [0, {ring.size})")
        self.ring = ring
        self.bits = bits
        self._indices = None
        self._mask = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_indices(cls, ring: Ring, indices: Iterable[Union[int, Element]]) -> "ElementSet":
        bits = 0
        for i in indices:
            if isinstance(i, Element):
                if i.ring != ring:
                    raise RingMismatch("element from a different ring")
                i = i.index
            i = int(i)
            ring._check_index(i)
            bits |= 1 << i
        return cls(ring, bits)

    @classmethod
    def from_mask(cls, ring: Ring, mask: np.ndarray) -> "ElementSet":
        packed = np.packbits(mask.astype(np.uint8), bitorder="little").tobytes()
        return cls(ring, int.from_bytes(packed, "little"))

    @classmethod
    def empty(cls, ring: Ring) -> "ElementSet":
        return cls(ring, 0)

    @classmethod
    def full(cls, ring: Ring) -> "ElementSet":
        return cls(ring, (1 << ring.size) - 1)

    @classmethod
    def units(cls, ring: Ring) -> "ElementSet":
        return cls.from_indices(ring, ring.indices(ElementFilter.UNITS))

    @classmethod
    def maximal_ideal(cls, ring: Ring) -> "ElementSet":
        return cls.from_indices(ring, ring.indices(ElementFilter.MAXIMAL_IDEAL))

    # -- views ---------------------------------------------------------------

    @property
    def card(self) -> int:
        return bin(self.bits).count("1")

    def indices(self) -> np.ndarray:
        if self._indices is None:
            self._indices = np.flatnonzero(self.mask()).astype(np.int64)
            self._indices.flags.writeable = False
        return self._indices

    def mask(self) -> np.ndarray:
        if self._mask is None:
            raw = np.frombuffer(
                self.bits.to_bytes((self.ring.size + 7) // 8, "little"), np.uint8
            )
            m = np.unpackbits(raw, bitorder="little")[: self.ring.size].astype(bool)
            m.flags.writeable = False
            self._mask = m
        return self._mask

    def __contains__(self, item: Union[int, Element]) -> bool:
        if isinstance(item, Element):
            if item.ring != self.ring:
                return False
            item = item.index
        return 0 <= item < self.ring.size and (self.bits >> item) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        return iter(int(i) for i in self.indices())

    def __len__(self) -> int:
        return self.card

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ElementSet)
            and self.ring == other.ring
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.ring, self.bits))

    def __and__(self, other: "ElementSet") -> "ElementSet":
        _same_ring(self, other)
        return ElementSet(self.ring, self.bits & other.bits)

    def __or__(self, other: "ElementSet") -> "ElementSet":
        _same_ring(self, other)
        return ElementSet(self.ring, self.bits | other.bits)

    def issubset(self, other: "ElementSet") -> bool:
        _same_ring(self, other)
        return self.bits & ~other.bits == 0

    def all_units(self) -> bool:
        return self.issubset(ElementSet.units(self.ring))

    def __repr__(self) -> str:
        idx = list(self.indices()[:12])
        tail = ", ..." if self.card > 12 else ""
        return f"ElementSet({self.ring.descriptor}, {{{', '.join(map(str, idx))}{tail}}})"


def _same_ring(a: ElementSet, b: ElementSet) -> None:
    if a.ring != b.ring:
        raise RingMismatch(
            f"sets over {a.ring.descriptor} and {b.ring.descriptor}"
        )


# -- pointwise set algebra ----------------------------------------------------

_CHUNK_CELLS = 4_000_000


def _pairwise_mask(ring: Ring, left: np.ndarray, right: np.ndarray, op) -> np.ndarray:
    """Boolean mask of {op(a, b)} over all pairs, chunked to bound memory."""
    seen = np.zeros(ring.size, dtype=bool)
    if len(left) == 0 or len(right) == 0:
        return seen
    step = max(1, _CHUNK_CELLS // len(right))
    for lo in range(0, len(left), step):
        block = op(left[lo : lo + step, None], right[None, :])
        seen[block.reshape(-1)] = True
    return seen


def sumset(a: ElementSet, b: ElementSet) -> ElementSet:
    _same_ring(a, b)
    return ElementSet.from_mask(
        a.ring, _pairwise_mask(a.ring, a.indices(), b.indices(), a.ring.add_many)
    )


def productset(a: ElementSet, b: ElementSet) -> ElementSet:
    _same_ring(a, b)
    return ElementSet.from_mask(
        a.ring, _pairwise_mask(a.ring, a.indices(), b.indices(), a.ring.mul_many)
    )


def square_set(a: ElementSet) -> ElementSet:
    ring = a.ring
    idx = a.indices()
    seen = np.zeros(ring.size, dtype=bool)
    if len(idx):
        seen[ring.mul_many(idx, idx)] = True
    return ElementSet.from_mask(ring, seen)


def iterated_sumset(a: ElementSet, n: int) -> ElementSet:
    """n-fold sumset a + a + ... + a (n >= 1 copies)."""
    if n < 1:
        raise BadArity(f"need n >= 1, got {n}")
    out = a
    for _ in range(n - 1):
        out = sumset(out, a)
    return out


def restrict_to_units(a: ElementSet) -> ElementSet:
    return a & ElementSet.units(a.ring)


# -- tuple statistics ---------------------------------------------------------


def _check_form_args(a: ElementSet, n: int, caps: Caps) -> None:
    if not a.all_units():
        raise NotUnits("the base set must consist of units")
    if not 2 <= n <= caps.max_n:
        raise BadArity(f"need 2 <= n <= {caps.max_n}, got {n}")


def form_tuple_count(a: ElementSet, n: int) -> int:
    """Number of tuples the fold visits: |A^2| * (|A+A|*|A|)**(n-1)."""
    sq = square_set(a)
    s = sumset(a, a)
    return sq.card * (s.card * a.card) ** (n - 1)


def _form_values(a: ElementSet, n: int, caps: Caps) -> np.ndarray:
    """Folded values x + sum (b_i - c_i)^2 for every tuple, flattened."""
    ring = a.ring
    sq = square_set(a)
    s = sumset(a, a)
    total = sq.card * (s.card * a.card) ** (n - 1)
    if total > caps.max_tuple_count:
        raise TooLarge(
            f"{total} tuples exceed cap {caps.max_tuple_count}; shrink A or n"
        )
    if total == 0:
        return np.empty(0, dtype=np.int64)
    diffs = ring.sub_many(s.indices()[:, None], a.indices()[None, :]).reshape(-1)
    sq_diffs = ring.mul_many(diffs, diffs)
    vals = sq.indices()
    for _ in range(n - 1):
        vals = _combine_add(ring, vals, sq_diffs)
    return vals


def _combine_add(ring: Ring, vals: np.ndarray, terms: np.ndarray) -> np.ndarray:
    out = np.empty(len(vals) * len(terms), dtype=np.int64)
    step = max(1, _CHUNK_CELLS // max(1, len(terms)))
    pos = 0
    for lo in range(0, len(vals), step):
        block = ring.add_many(vals[lo : lo + step, None], terms[None, :]).reshape(-1)
        out[pos : pos + block.size] = block
        pos += block.size
    return out


def count_form_solutions(a: ElementSet, n: int, caps: Caps = DEFAULT_CAPS) -> int:
    """Tuples whose folded value lies in the n-fold sumset of A^2.

    Implemented as a membership test per tuple; tests cross-check it
    against the histogram route and a scalar brute-force oracle.
    """
    _check_form_args(a, n, caps)
    vals = _form_values(a, n, caps)
    target = iterated_sumset(square_set(a), n)
    return int(target.mask()[vals].sum())


def form_value_histogram(a: ElementSet, n: int, caps: Caps = DEFAULT_CAPS) -> np.ndarray:
    """Multiplicity of each ring value under the fold (length = ring size)."""
    _check_form_args(a, n, caps)
    vals = _form_values(a, n, caps)
    return np.bincount(vals, minlength=a.ring.size).astype(np.int64)

def form_energy(a: ElementSet, n: int, caps: Caps = DEFAULT_CAPS) -> int:
    """Sum of squared multiplicities over all values (collision energy)."""
    hist = form_value_histogram(a, n, caps)
    return sum(int(c) * int(c) for c in hist if c)


def triple_product_sizes(
    a: ElementSet, b: ElementSet, c: ElementSet
) -> tuple[int, int, int]:
    """(|A.B|, |B.C|, |B+C|) for unit sets A, B, C."""
    _same_ring(a, b)
    _same_ring(b, c)
    if not (a.all_units() and b.all_units() and c.all_units()):
        raise NotUnits("all three sets must consist of units")
    return (
        productset(a, b).card,
        productset(b, c).card,
        sumset(b, c).card,
    )


def sample_unit_subset(ring: Ring, k: int, seed: Union[int, random.Random]) -> ElementSet:
    """Uniform random k-subset of the units, deterministic in the seed."""
    units = [int(u) for u in ring.indices(ElementFilter.UNITS)]
    if not 1 <= k <= len(units):
        raise BadSize(f"need 1 <= k <= {len(units)} for {ring.descriptor}, got {k}")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return ElementSet.from_indices(ring, rng.sample(units, k))
