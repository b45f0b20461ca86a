"""Finite Lebesgue model: cell spaces, permutation automorphisms, exact metrics.

The unit interval carrying Lebesgue measure is modeled by ``N`` equal cells,
each of exact mass ``1/N``; measure-preserving automorphisms become
permutations of the cell indices, measurable sets become unions of cells, and
every mass or distance is an exact :class:`fractions.Fraction`.  No floating
point enters this module.

Randomness contract: seeded draws use numpy's legacy ``RandomState``
(MT19937) whose output stream is frozen by numpy's compatibility policy, so
identical seeds give identical permutations on every platform.  Seeds are
reduced mod 2**32.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError


@dataclass(frozen=True)
class CellSpace:
    """``N`` equal cells of mass ``1/N`` standing in for the unit interval."""

    resolution: int

    def __post_init__(self) -> None:
        if self.resolution < 1:
            raise ValueError(f"resolution must be >= 1, got {self.resolution}")

    @property
    def cell_mass(self) -> Fraction:
        return Fraction(1, self.resolution)

    @property
    def total_mass(self) -> Fraction:
        # exact product N * (1/N)
        return self.resolution * self.cell_mass


@dataclass(frozen=True)
class Automorphism:
    """A measure-preserving automorphism as a permutation of the cells.

    ``images[i]`` is the index of the image cell of cell ``i``; the array must
    be a bijection of ``{0, ..., N-1}``.
    """

    space: CellSpace
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.space.resolution
        if len(self.images) != n:
            raise ValueError(f"expected {n} images, got {len(self.images)}")
        seen = [False] * n
        for j in self.images:
            if not 0 <= j < n or seen[j]:
                raise ValueError("images do not form a bijection")
            seen[j] = True

    def apply(self, cell: int) -> int:
        return self.images[cell]

    def __call__(self, cell: int) -> int:
        return self.images[cell]


@dataclass(frozen=True)
class CellSet:
    """A union of cells; the finite model of a measurable set."""

    space: CellSpace
    members: frozenset[int]

    def __post_init__(self) -> None:
        n = self.space.resolution
        if any(not 0 <= c < n for c in self.members):
            raise ValueError("cell index out of range")

    @property
    def mass(self) -> Fraction:
        return Fraction(len(self.members), self.space.resolution)


@dataclass(frozen=True)
class Partition:
    """A labeling of the cells; cells of one label form one partition cell.

    Labels are nonnegative; a label value may be unoccupied (empty cell).
    """

    space: CellSpace
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.labels) != self.space.resolution:
            raise ValueError("one label per cell required")
        if any(l < 0 for l in self.labels):
            raise ValueError("labels must be nonnegative")

    @property
    def num_labels(self) -> int:
        return max(self.labels) + 1

    def cells_of(self, label: int) -> CellSet:
        return CellSet(
            self.space,
            frozenset(i for i, l in enumerate(self.labels) if l == label),
        )


def _require_same_space(s: Automorphism, t: Automorphism) -> None:
    if s.space != t.space:
        raise DimensionMismatchError(
            f"resolutions differ: {s.space.resolution} vs {t.space.resolution}"
        )


def identity(space: CellSpace) -> Automorphism:
    return Automorphism(space, tuple(range(space.resolution)))


def rotation(space: CellSpace, step: int = 1) -> Automorphism:
    """The cyclic shift ``i -> i + step mod N``; a single N-cycle for step 1."""
    n = space.resolution
    return Automorphism(space, tuple((i + step) % n for i in range(n)))


def compose(s: Automorphism, t: Automorphism) -> Automorphism:
    """Composition ``s after t``: ``compose(s, t)(i) == s(t(i))``."""
    _require_same_space(s, t)
    return Automorphism(s.space, tuple(s.images[j] for j in t.images))


def invert(s: Automorphism) -> Automorphism:
    inv = [0] * s.space.resolution
    for i, j in enumerate(s.images):
        inv[j] = i
    return Automorphism(s.space, tuple(inv))


def apply_set(s: Automorphism, a: CellSet) -> CellSet:
    """Image of a cell set under an automorphism."""
    if s.space != a.space:
        raise DimensionMismatchError(
            f"resolutions differ: {s.space.resolution} vs {a.space.resolution}"
        )
    return CellSet(a.space, frozenset(s.images[c] for c in a.members))


def hamming_distance(s: Automorphism, t: Automorphism) -> Fraction:
    """Mass of the set of cells where the two permutations disagree."""
    _require_same_space(s, t)
    moved = sum(1 for a, b in zip(s.images, t.images) if a != b)
    return Fraction(moved, s.space.resolution)


def weak_distance(
    s: Automorphism, t: Automorphism, family: Sequence[CellSet]
) -> Fraction:
    """Weighted sum of symmetric-difference masses over a set family.

    Term ``i`` contributes ``2**-(i+1) * mass(s.A_i symdiff t.A_i)``; with the
    dyadic family this is the finite surrogate for the weak topology.  Always
    dominated by ``2 * hamming_distance(s, t)``.
    """
    _require_same_space(s, t)
    total = Fraction(0)
    for i, a in enumerate(family):
        if a.space != s.space:
            raise DimensionMismatchError("family member on a different space")
        diff = apply_set(s, a).members ^ apply_set(t, a).members
        total += Fraction(1, 2 ** (i + 1)) * Fraction(
            len(diff), s.space.resolution
        )
    return total


def contiguous_chunks(n_cells: int, n_chunks: int) -> list[range]:
    """Split ``range(n_cells)`` into ``n_chunks`` contiguous runs.

    Greedy left to right: each run takes the ceiling of what remains, so run
    sizes are ``ceil(N/k)`` then ``floor(N/k)``.
    """
    out = []
    start = 0
    remaining = n_cells
    for j in range(n_chunks):
        size = -(-remaining // (n_chunks - j))
        out.append(range(start, start + size))
        start += size
        remaining -= size
    return out


def dyadic_family(space: CellSpace) -> list[CellSet]:
    """Deterministic enumeration of dyadic cell ranges, coarse to fine.

    The full space first, then both halves, then quarters, down to single
    cells, left to right within each scale.  When ``N`` is not a power of two
    the halving uses :func:`contiguous_chunks` (non-canonical sizes, and a
    range may repeat across scales once it is already a singleton).
    """
    n = space.resolution
    family: list[CellSet] = []
    scale = 0
    while True:
        chunks = contiguous_chunks(n, min(2**scale, n))
        family.extend(CellSet(space, frozenset(c)) for c in chunks)
        if all(len(c) == 1 for c in chunks):
            return family
        scale += 1


def cycles(t: Automorphism) -> list[list[int]]:
    """Disjoint cycles of the permutation, each starting at its minimal cell,
    ordered by that minimal cell."""
    n = t.space.resolution
    seen = [False] * n
    out = []
    for start in range(n):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        j = t.images[start]
        while j != start:
            cyc.append(j)
            seen[j] = True
            j = t.images[j]
        out.append(cyc)
    return out


def cycle_census(t: Automorphism) -> tuple[int, ...]:
    """Multiset of cycle lengths as a sorted tuple; lengths sum to N."""
    return tuple(sorted(len(c) for c in cycles(t)))


def random_automorphism(space: CellSpace, seed: int) -> Automorphism:
    """Uniform random permutation from a seeded, platform-stable generator.

    Uses numpy's legacy ``RandomState`` (MT19937) and its frozen
    Fisher-Yates ``permutation``; the same seed yields the same permutation
    everywhere.
    """
    rng = np.random.RandomState(seed % 2**32)
    return Automorphism(space, tuple(int(i) for i in rng.permutation(space.resolution)))


def full_cells(space: CellSpace) -> CellSet:
    return CellSet(space, frozenset(range(space.resolution)))


def cell_range(space: CellSpace, start: int, stop: int) -> CellSet:
    return CellSet(space, frozenset(range(start, stop)))


PERM_HEADER = "ergolab-perm v1"


def perm_to_text(a: Automorphism) -> str:
    """Canonical text form; round trips bit-exactly through perm_from_text."""
    images = " ".join(str(i) for i in a.images)
    return f"{PERM_HEADER}\nN {a.space.resolution}\n{images}\n"


def perm_from_text(text: str) -> Automorphism:
    lines = text.splitlines()
    if len(lines) < 3 or lines[0] != PERM_HEADER:
        raise ValueError("not an ergolab-perm v1 document")
    tag, n_str = lines[1].split()
    if tag != "N":
        raise ValueError("missing N line")
    n = int(n_str)
    images = tuple(int(tok) for tok in lines[2].split())
    if len(images) != n:
        raise ValueError(f"expected {n} images, got {len(images)}")
    return Automorphism(CellSpace(n), images)
