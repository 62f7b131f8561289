"""Truncation boxes and the sparse vectors living on them.

A box is the finite index window standing in for the full index set: triple
boxes enumerate (n, mu, nu) with 1 <= n <= n_max and so on, single boxes
enumerate coordinates 1..d.  Vectors store only their nonzero entries, so
evaluation cost follows the support, not the box volume.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import DomainError, ModeError
from .scalars import (
    DEFAULT_TOLERANCES,
    RATIONAL,
    Scalar,
    Tolerances,
    as_scalar,
    check_mode,
    is_zero,
)

Index = "tuple[int, int, int] | int"


@dataclass(frozen=True)
class TripleBox:
    """Index window for triple-indexed spaces; all bounds inclusive, >= 1."""

    n_max: int
    mu_max: int
    nu_max: int

    def __post_init__(self) -> None:
        if min(self.n_max, self.mu_max, self.nu_max) < 1:
            raise DomainError(f"box bounds must be >= 1, got {self}")

    @property
    def dimension(self) -> int:
        return self.n_max * self.mu_max * self.nu_max

    def contains(self, idx) -> bool:
        if not (isinstance(idx, tuple) and len(idx) == 3):
            return False
        n, mu, nu = idx
        return 1 <= n <= self.n_max and 1 <= mu <= self.mu_max and 1 <= nu <= self.nu_max

    def indices(self) -> Iterator[tuple[int, int, int]]:
        for n in range(1, self.n_max + 1):
            for mu in range(1, self.mu_max + 1):
                for nu in range(1, self.nu_max + 1):
                    yield (n, mu, nu)

    def position(self, idx) -> int:
        n, mu, nu = idx
        return ((n - 1) * self.mu_max + (mu - 1)) * self.nu_max + (nu - 1)


@dataclass(frozen=True)
class SingleBox:
    """Index window 1..d for singly-indexed spaces."""

    d: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise DomainError(f"box dimension must be >= 1, got {self.d}")

    @property
    def dimension(self) -> int:
        return self.d

    def contains(self, idx) -> bool:
        return isinstance(idx, int) and not isinstance(idx, bool) and 1 <= idx <= self.d

    def indices(self) -> Iterator[int]:
        return iter(range(1, self.d + 1))

    def position(self, idx) -> int:
        return idx - 1


Box = TripleBox | SingleBox


def _require_index(box: Box, idx) -> None:
    if not box.contains(idx):
        raise DomainError(f"index {idx!r} outside box {box}")


@dataclass(frozen=True)
class TruncatedVector:
    """Immutable sparse vector on a box; zero entries are never stored.

    The entries tuple is kept sorted by box position, which makes equality,
    hashing and serialization canonical.
    """

    box: Box
    mode: str
    entries: tuple = ()

    @staticmethod
    def create(box: Box, mode: str, values: Mapping | Iterable = ()) -> "TruncatedVector":
        check_mode(mode)
        items = values.items() if isinstance(values, Mapping) else values
        merged: dict = {}
        for idx, raw in items:
            _require_index(box, idx)
            val = as_scalar(raw, mode)
            merged[idx] = merged.get(idx, as_scalar(0, mode)) + val
        cleaned = tuple(
            (idx, val)
            for idx, val in sorted(merged.items(), key=lambda kv: box.position(kv[0]))
            if val != 0
        )
        return TruncatedVector(box, mode, cleaned)

    @cached_property
    def _lookup(self) -> dict:
        return dict(self.entries)

    def get(self, idx) -> Scalar:
        _require_index(self.box, idx)
        return self._lookup.get(idx, as_scalar(0, self.mode))

    @property
    def support(self) -> tuple:
        return tuple(idx for idx, _ in self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def _check_peer(self, other: "TruncatedVector") -> None:
        if self.box != other.box:
            raise DomainError(f"box mismatch: {self.box} vs {other.box}")
        if self.mode != other.mode:
            raise ModeError(f"mode mismatch: {self.mode} vs {other.mode}")

    def __add__(self, other: "TruncatedVector") -> "TruncatedVector":
        self._check_peer(other)
        merged = dict(self.entries)
        for idx, val in other.entries:
            merged[idx] = merged.get(idx, as_scalar(0, self.mode)) + val
        cleaned = tuple(
            (idx, val)
            for idx, val in sorted(merged.items(), key=lambda kv: self.box.position(kv[0]))
            if val != 0
        )
        return TruncatedVector(self.box, self.mode, cleaned)

    def __sub__(self, other: "TruncatedVector") -> "TruncatedVector":
        return self + other.scale(-1)

    def scale(self, factor) -> "TruncatedVector":
        c = as_scalar(factor, self.mode)
        if c == 0:
            return TruncatedVector(self.box, self.mode, ())
        return TruncatedVector(
            self.box, self.mode, tuple((idx, c * val) for idx, val in self.entries)
        )

    def __neg__(self) -> "TruncatedVector":
        return self.scale(-1)

    def dot(self, other: "TruncatedVector") -> Scalar:
        """Standard coordinate inner product; drives orthogonal complements."""
        self._check_peer(other)
        small, big = (self, other) if len(self.entries) <= len(other.entries) else (other, self)
        total = as_scalar(0, self.mode)
        for idx, val in small.entries:
            total += val * big._lookup.get(idx, as_scalar(0, self.mode))
        return total

    def dense(self) -> list:
        """Coordinates in box enumeration order; for matrix work only."""
        out = [as_scalar(0, self.mode)] * self.box.dimension
        for idx, val in self.entries:
            out[self.box.position(idx)] = val
        return out

    def approx_equal(
        self, other: "TruncatedVector", tol: Tolerances = DEFAULT_TOLERANCES
    ) -> bool:
        self._check_peer(other)
        if self.mode == RATIONAL:
            return self.entries == other.entries
        keys = set(self.support) | set(other.support)
        return all(is_zero(self.get(k) - other.get(k), self.mode, tol) for k in keys)


def zero_vector(box: Box, mode: str) -> TruncatedVector:
    check_mode(mode)
    return TruncatedVector(box, mode, ())


def unit_vector(box: Box, mode: str, idx) -> TruncatedVector:
    return TruncatedVector.create(box, mode, [(idx, 1)])


def vector_from_dense(box: Box, mode: str, coords: Iterable) -> TruncatedVector:
    coords = list(coords)
    if len(coords) != box.dimension:
        raise DomainError(f"expected {box.dimension} coordinates, got {len(coords)}")
    return TruncatedVector.create(box, mode, zip(box.indices(), coords))
