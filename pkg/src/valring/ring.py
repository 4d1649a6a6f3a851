"""Finite valuation rings with exact, vectorized arithmetic.

Two families cover every supported ring of size q**r, where q = p**s is
an odd prime power and r >= 1:

* ``ZPR``:  Z/p**r, the integers modulo a prime power (requires s = 1).
* ``FQTR``: F_q[t]/(t**r), truncated polynomials over the field with q
  elements.  For s > 1 the field is realized as F_p[x] modulo the
  lexicographically smallest monic irreducible of degree s.

Both are local rings: the unique maximal ideal is generated by the
uniformizer z (z = p for ZPR, z = t for FQTR), every element factors as
(unit) * z**k, and the units are exactly the elements whose valuation is
zero.  Characteristic 2 is rejected everywhere because the constructions
downstream divide by 2.

Elements are identified with integer indices in [0, q**r) through a
fixed mixed-radix encoding: the element with z-adic digits c_0, ...,
c_{r-1} (each a residue-field element, itself encoded as an integer in
[0, q) via base-p digits for s > 1) has index sum(c_k * q**k).  For ZPR
the index is simply the integer residue, so arithmetic is plain modular
arithmetic; for FQTR the index is a positional base-p numeral of the
full coefficient vector, so addition is digitwise and never carries.

The :class:`Ring` methods ending in ``_many`` operate on numpy arrays
of indices with broadcasting and are the backbone of the set-operation
and graph modules.  Rings and elements are immutable; everything here
is safe to share across threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .config import DEFAULT_CAPS
from .errors import (
    BadFamilyCombo,
    BadIndex,
    EvenPrime,
    NonPrime,
    NotAUnit,
    NotPrimePower,
    RingMismatch,
    TooLarge,
    ValringError,
)

__all__ = [
    "Ring",
    "RingFamily",
    "Element",
    "ElementFilter",
    "make_ring",
    "is_prime",
    "factor_prime_power",
    "smallest_irreducible",
]


class RingFamily(enum.Enum):
    ZPR = "zpr"
    FQTR = "fqtr"


class ElementFilter(enum.Enum):
    ALL = "all"
    UNITS = "units"
    MAXIMAL_IDEAL = "maximal_ideal"


def is_prime(n: int) -> bool:
    """Deterministic primality test by trial division.

    Ring sizes are capped around 2**16, so candidates are small and
    trial division is instant.
    """
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factor_prime_power(q: int) -> tuple[int, int]:
    """Write q as p**s with p prime, or raise NotPrimePower."""
    if q < 2:
        raise NotPrimePower(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if p * p > q:
            return q, 1  # q itself is prime: no factor up to sqrt
        if q % p:
            continue
        s = 0
        m = q
        while m % p == 0:
            m //= p
            s += 1
        if m != 1:
            raise NotPrimePower(f"{q} is not a prime power")
        return p, s
    raise NotPrimePower(f"{q} is not a prime power")


# ---------------------------------------------------------------------------
# dense polynomial helpers over F_p (coefficient lists, ascending degree)


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    # m must be monic
    rem = list(a)
    dm = len(m) - 1
    while len(rem) - 1 >= dm and rem:
        lead = rem[-1]
        shift = len(rem) - 1 - dm
        if lead:
            for i, mi in enumerate(m):
                rem[shift + i] = (rem[shift + i] - lead * mi) % p
        rem.pop()
        _poly_trim(rem)
    return rem


def _poly_is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    deg = len(coeffs) - 1
    if deg < 1 or coeffs[0] == 0:  # divisible by x
        return deg == 1
    for d in range(1, deg // 2 + 1):
        for enc in range(p**d):
            div = _digits(enc, p, d) + [1]
            if not _poly_mod(coeffs, div, p):
                return False
    return True


def _digits(n: int, base: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        out.append(n % base)
        n //= base
    return out


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, s: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree s over F_p.

    "Smallest" means by the integer whose base-p digits are the
    non-leading coefficients (constant term least significant), scanned
    in ascending order.  Returns ascending coefficients including the
    leading 1.
    """
    for enc in range(p**s):
        coeffs = _digits(enc, p, s) + [1]
        if _poly_is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise AssertionError("irreducibles exist in every degree")


# ---------------------------------------------------------------------------


class Ring:
    """One finite valuation ring; construct through :func:`make_ring`.

    Attributes
    ----------
    p, s, r : int
        Residue characteristic, field degree, nilpotency degree.
    q : int
        Residue field size p**s.
    size : int
        Ring cardinality q**r.
    family : RingFamily
    modulus_coeffs : tuple[int, ...] | None
        Ascending coefficients of the irreducible defining F_q over
        F_p, or None when s = 1.
    """

    def __init__(self, p: int, s: int, r: int, family: RingFamily):
        self.p = p
        self.s = s
        self.r = r
        self.q = p**s
        self.size = self.q**r
        self.family = family
        self.unit_count = self.size - self.size // self.q
        self.descriptor = (
            f"z:{p}:{r}" if family is RingFamily.ZPR else f"f:{self.q}:{r}"
        )
        if family is RingFamily.ZPR:
            self.math_name = f"Z/{self.size}"
        elif r == 1:
            self.math_name = f"F_{self.q}"
        else:
            self.math_name = f"F_{self.q}[t]/(t^{r})"

        self.modulus_coeffs: Optional[tuple[int, ...]] = None
        self._q_pows = self.q ** np.arange(r, dtype=np.int64)
        self._p_pows = self.p ** np.arange(s, dtype=np.int64)
        self._pp_full = self.p ** np.arange(r * s, dtype=np.int64)
        self._exp: Optional[np.ndarray] = None
        self._log: Optional[np.ndarray] = None
        if s > 1:
            self.modulus_coeffs = smallest_irreducible(p, s)
            self._build_field_tables()
        self._key = (family, p, s, r, self.modulus_coeffs)
        self._inverse_table: Optional[np.ndarray] = None

    # -- residue field scalar ops (encoded values in [0, q)) ---------------

    def _field_mul_scalar(self, a: int, b: int) -> int:
        if self.s == 1:
            return (a * b) % self.p
        pa = _digits(a, self.p, self.s)
        pb = _digits(b, self.p, self.s)
        prod = _poly_mod(_poly_mul(pa, pb, self.p), self.modulus_coeffs, self.p)
        return sum(c * self.p**i for i, c in enumerate(prod))

    def _field_pow(self, a: int, e: int) -> int:
        out, base = 1, a
        while e:
            if e & 1:
                out = self._field_mul_scalar(out, base)
            base = self._field_mul_scalar(base, base)
            e >>= 1
        return out

    def _build_field_tables(self) -> None:
        # find a multiplicative generator, then exp/log tables
        n = self.q - 1
        fac, m = [], n
        f = 2
        while f * f <= m:
            if m % f == 0:
                fac.append(f)
                while m % f == 0:
                    m //= f
            f += 1
        if m > 1:
            fac.append(m)
        gen = None
        for cand in range(2, self.q):
            if all(self._field_pow(cand, n // ell) != 1 for ell in fac):
                gen = cand
                break
        assert gen is not None, "cyclic unit group always has a generator"
        exp = np.zeros(n, dtype=np.int64)
        log = np.zeros(self.q, dtype=np.int64)
        acc = 1
        for i in range(n):
            exp[i] = acc
            log[acc] = i
            acc = self._field_mul_scalar(acc, gen)
        assert acc == 1, "generator order must be q - 1"
        self._exp, self._log = exp, log

    def _field_inv_scalar(self, a: int) -> int:
        if a == 0:
            raise NotAUnit("0 has no inverse in the residue field")
        if self.s == 1:
            return pow(a, self.p - 2, self.p)
        return int(self._exp[(-self._log[a]) % (self.q - 1)])

    # -- digit views --------------------------------------------------------

    def _qdigits(self, a: np.ndarray) -> np.ndarray:
        return (a[..., None] // self._q_pows) % self.q

    def coeffs(self, index: int) -> tuple[int, ...]:
        """z-adic digits (c_0, ..., c_{r-1}) of an element index."""
        self._check_index(index)
        return tuple(int(d) for d in self._qdigits(np.int64(index)))

    def from_coeffs(self, digits: Iterable[int]) -> int:
        ds = list(digits)
        if len(ds) > self.r or any(not 0 <= d < self.q for d in ds):
            raise BadIndex(f"bad digit vector {ds} for {self.descriptor}")
        return sum(d * self.q**k for k, d in enumerate(ds))

    def _check_index(self, a: int) -> None:
        if not 0 <= a < self.size:
            raise BadIndex(f"index {a} outside [0, {self.size})")

    # -- vectorized arithmetic on index arrays -------------------------------

    def _field_mul_vec(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.s == 1:
            return (x * y) % self.p
        out = np.zeros(np.broadcast(x, y).shape, dtype=np.int64)
        nz = (x != 0) & (y != 0)
        if nz.any():
            xs, ys = np.broadcast_arrays(x, y)
            out[nz] = self._exp[
                (self._log[xs[nz]] + self._log[ys[nz]]) % (self.q - 1)
            ]
        return out

    def _field_add_vec(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.s == 1:
            return (x + y) % self.p
        dx = (x[..., None] // self._p_pows) % self.p
        dy = (y[..., None] // self._p_pows) % self.p
        return (((dx + dy) % self.p) * self._p_pows).sum(axis=-1)

    def add_many(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.family is RingFamily.ZPR:
            return (a + b) % self.size
        da = (a[..., None] // self._pp_full) % self.p
        db = (b[..., None] // self._pp_full) % self.p
        return (((da + db) % self.p) * self._pp_full).sum(axis=-1)

    def neg_many(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.family is RingFamily.ZPR:
            return (self.size - a) % self.size
        da = (a[..., None] // self._pp_full) % self.p
        return (((self.p - da) % self.p) * self._pp_full).sum(axis=-1)

    def sub_many(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.family is RingFamily.ZPR:
            return (a - b) % self.size
        da = (a[..., None] // self._pp_full) % self.p
        db = (b[..., None] // self._pp_full) % self.p
        return (((da - db) % self.p) * self._pp_full).sum(axis=-1)

    def mul_many(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.family is RingFamily.ZPR:
            return (a * b) % self.size
        a, b = np.broadcast_arrays(a, b)
        ca = self._qdigits(a)
        cb = self._qdigits(b)
        out = np.zeros(a.shape + (self.r,), dtype=np.int64)
        # truncated convolution of z-adic digit vectors
        for i in range(self.r):
            for j in range(self.r - i):
                prod = self._field_mul_vec(ca[..., i], cb[..., j])
                out[..., i + j] = self._field_add_vec(out[..., i + j], prod)
        return (out * self._q_pows).sum(axis=-1)

    def valuation_many(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        digits = self._qdigits(a)
        nz = digits != 0
        return np.where(nz.any(axis=-1), nz.argmax(axis=-1), self.r)

    # -- scalar arithmetic on indices ----------------------------------------

    def add(self, a: int, b: int) -> int:
        return int(self.add_many(a, b))

    def sub(self, a: int, b: int) -> int:
        return int(self.sub_many(a, b))

    def neg(self, a: int) -> int:
        return int(self.neg_many(a))

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_many(a, b))

    def valuation(self, a: int) -> int:
        """z-adic valuation: r for zero, else the first nonzero digit."""
        self._check_index(a)
        if a == 0:
            return self.r
        k = 0
        while a % self.q == 0:
            a //= self.q
            k += 1
        return k

    def is_unit(self, a: int) -> bool:
        self._check_index(a)
        return a % self.q != 0

    def inv(self, a: int) -> int:
        """Inverse of a unit via Newton lifting from the residue field.

        y <- y * (2 - a*y) doubles z-adic precision each round, so
        ceil(log2(r)) rounds after the exact residue-field inverse
        suffice.  The result is checked before returning.
        """
        if not self.is_unit(a):
            raise NotAUnit(f"{a} is not a unit in {self.descriptor}")
        y = self._field_inv_scalar(a % self.q)
        two = self.from_int(2)
        for _ in range((self.r - 1).bit_length()):
            y = self.mul(y, self.sub(two, self.mul(a, y)))
        if self.mul(a, y) != self.from_int(1):
            raise AssertionError("Newton inversion failed to converge")
        return y

    def inverse_table(self) -> np.ndarray:
        """Index -> inverse index for units, 0 elsewhere.  Cached."""
        if self._inverse_table is None:
            units = self.indices(ElementFilter.UNITS)
            c0 = units % self.q
            if self.s == 1:
                inv0 = np.array(
                    [0] + [pow(v, self.p - 2, self.p) for v in range(1, self.p)],
                    dtype=np.int64,
                )
                y = inv0[c0]
            else:
                y = self._exp[(-self._log[c0]) % (self.q - 1)]
            two = np.int64(self.from_int(2))
            for _ in range((self.r - 1).bit_length()):
                y = self.mul_many(y, self.sub_many(two, self.mul_many(units, y)))
            if not (self.mul_many(units, y) == self.from_int(1)).all():
                raise AssertionError("vectorized inversion failed")
            table = np.zeros(self.size, dtype=np.int64)
            table[units] = y
            self._inverse_table = table
        return self._inverse_table

    def from_int(self, k: int) -> int:
        """Image of the integer k under the unique map Z -> R."""
        if self.family is RingFamily.ZPR:
            return k % self.size
        return k % self.p

    # -- enumeration ---------------------------------------------------------

    def indices(self, kind: ElementFilter = ElementFilter.ALL) -> np.ndarray:
        kind = ElementFilter(kind)
        all_idx = np.arange(self.size, dtype=np.int64)
        if kind is ElementFilter.ALL:
            return all_idx
        unit_mask = all_idx % self.q != 0
        if kind is ElementFilter.UNITS:
            return all_idx[unit_mask]
        return all_idx[~unit_mask]

    def elements(self, kind: ElementFilter = ElementFilter.ALL) -> list["Element"]:
        return [Element(self, int(i)) for i in self.indices(kind)]

    def element(self, index: int) -> "Element":
        return Element(self, index)

    @property
    def zero(self) -> "Element":
        return Element(self, 0)

    @property
    def one(self) -> "Element":
        return Element(self, 1)

    @property
    def uniformizer(self) -> "Element":
        # z = 0 when r = 1 (the ring is a field)
        if self.r < 2:
            return Element(self, 0)
        return Element(self, self.from_coeffs([0, 1]))

    def ideal_size(self, k: int) -> int:
        """Cardinality of the ideal generated by z**k."""
        if not 0 <= k <= self.r:
            raise BadIndex(f"power {k} outside [0, {self.r}]")
        return self.q ** (self.r - k)

    # -- plumbing ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, Ring) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"Ring({self.descriptor})"


@dataclass(frozen=True)
class Element:
    """A ring element, identified by its canonical index."""

    ring: Ring
    index: int

    def __post_init__(self):
        self.ring._check_index(self.index)

    def _same(self, other: "Element") -> None:
        if not isinstance(other, Element):
            raise TypeError(f"cannot combine Element with {type(other).__name__}")
        if other.ring != self.ring:
            raise RingMismatch(
                f"elements of {self.ring.descriptor} and {other.ring.descriptor}"
            )

    def __add__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.ring, self.ring.add(self.index, other.index))

    def __sub__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.ring, self.ring.sub(self.index, other.index))

    def __mul__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.ring, self.ring.mul(self.index, other.index))

    def __neg__(self) -> "Element":
        return Element(self.ring, self.ring.neg(self.index))

    def inverse(self) -> "Element":
        return Element(self.ring, self.ring.inv(self.index))

    @property
    def valuation(self) -> int:
        return self.ring.valuation(self.index)

    @property
    def is_unit(self) -> bool:
        return self.ring.is_unit(self.index)

    def coeffs(self) -> tuple[int, ...]:
        return self.ring.coeffs(self.index)

    def __repr__(self) -> str:
        return f"<{self.index} in {self.ring.descriptor}>"


@lru_cache(maxsize=64)
def _make_ring_cached(p: int, s: int, r: int, family: RingFamily, max_size: int) -> Ring:
    size = (p**s) ** r
    if size > max_size:
        raise TooLarge(
            f"ring size {size} exceeds cap {max_size}; raise max_size to override"
        )
    return Ring(p, s, r, family)


def make_ring(
    p: int,
    s: int,
    r: int,
    family: Union[RingFamily, str] = RingFamily.ZPR,
    max_size: Optional[int] = None,
) -> Ring:
    """Validate parameters and build (or fetch a cached) ring.

    Raises NonPrime, EvenPrime, BadFamilyCombo, or TooLarge on bad
    input.  Rings are cached by parameters, so repeated calls are cheap
    and equal parameters give the identical object.
    """
    if isinstance(family, str):
        try:
            family = RingFamily(family.lower())
        except ValueError:
            raise BadFamilyCombo(f"unknown family {family!r}") from None
    for name, val in (("p", p), ("s", s), ("r", r)):
        if not isinstance(val, int):
            raise ValringError(f"{name} must be an int, got {type(val).__name__}")
    if s < 1 or r < 1:
        raise ValringError(f"need s >= 1 and r >= 1, got s={s}, r={r}")
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if p == 2:
        raise EvenPrime("characteristic 2 is not supported; 2 must be a unit")
    if family is RingFamily.ZPR and s != 1:
        raise BadFamilyCombo("the Z/p**r family needs s = 1; use FQTR for q = p**s")
    cap = DEFAULT_CAPS.max_ring_size if max_size is None else max_size
    return _make_ring_cached(p, s, r, family, cap)
