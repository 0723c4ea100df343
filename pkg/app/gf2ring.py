"""Sparse polynomials in F2[x]/(x^r - 1).

A circulant r x r block is fully described by its first row, i.e. by a polynomial
whose support lists the columns holding a one. Supports are stored sorted; products
and inverses go through a packed integer form (bit i is the coefficient of x^i).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from app.errors import IndexOutOfRange, MismatchedModulus, NotInvertible, ParameterError


@dataclass(frozen=True)
class SparsePoly:
    r: int
    support: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.r < 1:
            raise ParameterError(f"Ring modulus r must be positive, got {self.r}")
        support = tuple(int(e) for e in self.support)
        for prev, cur in zip(support, support[1:]):
            if cur <= prev:
                raise ParameterError(f"Support must be strictly increasing, got {support}")
        if support and (support[0] < 0 or support[-1] >= self.r):
            raise IndexOutOfRange(f"Support {support} leaves [0, {self.r})")
        object.__setattr__(self, "support", support)

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.support, dtype=np.int64)

    @property
    def weight(self) -> int:
        return len(self.support)

    def is_zero(self) -> bool:
        return not self.support

    def __iter__(self) -> Iterator[int]:
        return iter(self.support)

    def __contains__(self, e: object) -> bool:
        return e in self.support

    def __add__(self, other: SparsePoly) -> SparsePoly:
        return add(self, other)

    def __mul__(self, other: SparsePoly) -> SparsePoly:
        return mul(self, other)

    def __str__(self) -> str:
        if not self.support:
            return "0"
        return " + ".join("1" if e == 0 else ("x" if e == 1 else f"x^{e}") for e in self.support)


def zero(r: int) -> SparsePoly:
    return SparsePoly(r, ())


def one(r: int) -> SparsePoly:
    return SparsePoly(r, (0,))


def from_support(r: int, support: Iterable[int]) -> SparsePoly:
    """Build a polynomial from an unordered collection of distinct exponents."""
    values = sorted(int(e) for e in support)
    if len(set(values)) != len(values):
        raise ParameterError(f"Duplicate exponents in support {values}")
    return SparsePoly(r, tuple(values))


def _from_sorted_array(r: int, arr: np.ndarray) -> SparsePoly:
    return SparsePoly(r, tuple(arr.tolist()))


def _check_same_ring(p: SparsePoly, q: SparsePoly):
    if p.r != q.r:
        raise MismatchedModulus(p.r, q.r)


def shift(p: SparsePoly, k: int) -> SparsePoly:
    """x^k * p: every exponent moves k places to the right, cyclically."""
    if not p.support:
        return p
    return _from_sorted_array(p.r, np.sort((p.array + k) % p.r))


def transpose(p: SparsePoly) -> SparsePoly:
    """p(x^-1). Column j of the circulant of p has support shift(transpose(p), j)."""
    if not p.support:
        return p
    return _from_sorted_array(p.r, np.sort((-p.array) % p.r))


def add(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    _check_same_ring(p, q)
    return _from_sorted_array(p.r, np.setxor1d(p.array, q.array, assume_unique=True))


def intersect_count(p: SparsePoly, q: SparsePoly) -> int:
    _check_same_ring(p, q)
    return int(np.intersect1d(p.array, q.array, assume_unique=True).size)


# packed integer form


def to_int(p: SparsePoly) -> int:
    value = 0
    for e in p.support:
        value |= 1 << e
    return value


def from_int(r: int, value: int) -> SparsePoly:
    if value < 0 or value.bit_length() > r:
        raise ParameterError(f"Packed value does not fit in {r} coefficients")
    raw = np.frombuffer(value.to_bytes((r + 7) // 8, "little"), dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="little")[:r]
    return _from_sorted_array(r, np.flatnonzero(bits))


def to_dense(p: SparsePoly) -> np.ndarray:
    dense = np.zeros(p.r, dtype=np.uint8)
    dense[p.array] = 1
    return dense


def from_dense(r: int, bits) -> SparsePoly:
    bits = np.asarray(bits)
    if bits.shape != (r,):
        raise ParameterError(f"Dense vector has shape {bits.shape}, expected ({r},)")
    return _from_sorted_array(r, np.flatnonzero(bits & 1))


def to_hex(p: SparsePoly) -> str:
    """Little-endian packed form: byte 0 holds the coefficients of x^0..x^7."""
    return to_int(p).to_bytes((p.r + 7) // 8, "little").hex()


def from_hex(r: int, text: str) -> SparsePoly:
    try:
        raw = bytes.fromhex(text)
    except ValueError as exc:
        raise ParameterError(f"Not a hex string: {text[:16]}...") from exc
    return from_int(r, int.from_bytes(raw, "little"))


def _rotate(value: int, k: int, r: int, mask: int) -> int:
    if k == 0:
        return value
    return ((value << k) | (value >> (r - k))) & mask


def mul(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    """Ring product: XOR of the rotations of the denser factor by the sparser one."""
    _check_same_ring(p, q)
    if p.weight < q.weight:
        p, q = q, p
    r = p.r
    mask = (1 << r) - 1
    dense = to_int(p)
    acc = 0
    for e in q.support:
        acc ^= _rotate(dense, e, r, mask)
    return from_int(r, acc)


# binary polynomial Euclid on packed integers


def _clmul(a: int, b: int) -> int:
    if a.bit_count() > b.bit_count():
        a, b = b, a
    c = 0
    while a:
        low = a & -a
        c ^= b << (low.bit_length() - 1)
        a ^= low
    return c


def _divmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("division by zero polynomial")
    q = 0
    db = b.bit_length()
    while a.bit_length() >= db:
        s = a.bit_length() - db
        q ^= 1 << s
        a ^= b << s
    return q, a


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _divmod(a, b)[1]
    return a


def _modulus(r: int) -> int:
    return (1 << r) | 1


def is_invertible(p: SparsePoly) -> bool:
    return _gcd(_modulus(p.r), to_int(p)) == 1


def invert(p: SparsePoly) -> SparsePoly:
    """Inverse of p modulo x^r - 1 by the extended Euclidean algorithm."""
    modulus = _modulus(p.r)
    a, b = to_int(p), modulus
    s, s1 = 1, 0
    while b:
        q, rem = _divmod(a, b)
        a, b = b, rem
        s, s1 = s1, s ^ _clmul(q, s1)
    if a != 1:
        raise NotInvertible(f"{p} shares a factor with x^{p.r} - 1")
    return from_int(p.r, _divmod(s, modulus)[1])
