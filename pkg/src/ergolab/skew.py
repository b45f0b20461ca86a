"""Skew products over a fixed base, the fiber-product joining, orbit analysis.

Grid index layouts are fixed and every census and serialization depends on
them: a point ``(z, y)`` of the two-coordinate grid has index ``z*M + y``, a
triple ``(z, y, y')`` of the fiber-product grid has index
``z*M*M + y*M + y'``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import Automorphism, CellSpace, identity
from .errors import DegenerateFiberError, DimensionMismatchError, StructuralError


@dataclass(frozen=True)
class Cocycle:
    """A fiber automorphism attached to every base cell: ``maps[z]`` acts on
    the fiber over ``z``."""

    base_space: CellSpace
    fiber_space: CellSpace
    maps: tuple[Automorphism, ...]

    def __post_init__(self) -> None:
        if len(self.maps) != self.base_space.resolution:
            raise ValueError("one fiber map per base cell required")
        for m in self.maps:
            if m.space != self.fiber_space:
                raise DimensionMismatchError("fiber map on wrong space")

    def table(self) -> np.ndarray:
        """(N, M) int array, row z = images of maps[z]."""
        return np.array([m.images for m in self.maps], dtype=np.int64)


def constant_cocycle(base_space: CellSpace, fiber_map: Automorphism) -> Cocycle:
    return Cocycle(
        base_space, fiber_map.space, (fiber_map,) * base_space.resolution
    )


def identity_cocycle(base_space: CellSpace, fiber_space: CellSpace) -> Cocycle:
    return constant_cocycle(base_space, identity(fiber_space))


@dataclass(frozen=True)
class SkewSystem:
    """Base permutation plus cocycle, acting on the N*M grid by
    ``(z, y) -> (base_map(z), maps[z](y))``.

    Sets of the form (base set) x (full fiber) are carried to
    (image base set) x (full fiber), so the base factor is preserved.
    """

    base_map: Automorphism
    cocycle: Cocycle

    def __post_init__(self) -> None:
        if self.base_map.space != self.cocycle.base_space:
            raise DimensionMismatchError(
                "base map and cocycle disagree on the base resolution"
            )

    @property
    def base_resolution(self) -> int:
        return self.base_map.space.resolution

    @property
    def fiber_resolution(self) -> int:
        return self.cocycle.fiber_space.resolution


def make_skew(base_map: Automorphism, cocycle: Cocycle) -> SkewSystem:
    """Assemble a skew system and verify the flattened action is a bijection."""
    system = SkewSystem(base_map, cocycle)
    flatten(system)  # Automorphism construction validates bijectivity
    return system


def grid_space(system: SkewSystem) -> CellSpace:
    return CellSpace(system.base_resolution * system.fiber_resolution)


def flatten(system: SkewSystem) -> Automorphism:
    """The system as one permutation of the N*M grid cells (index z*M + y)."""
    m = system.fiber_resolution
    base = system.base_map.images
    images = []
    for z in range(system.base_resolution):
        fiber = system.cocycle.maps[z].images
        images.extend(base[z] * m + fiber[y] for y in range(m))
    return Automorphism(grid_space(system), tuple(images))


def return_map(system: SkewSystem, z0: int) -> Automorphism:
    """First-return composition of the cocycle along the base cycle through
    ``z0``: the map applied at ``z0`` acts first."""
    result = identity(system.cocycle.fiber_space)
    z = z0
    while True:
        step = system.cocycle.maps[z]
        result = Automorphism(
            result.space, tuple(step.images[j] for j in result.images)
        )
        z = system.base_map.images[z]
        if z == z0:
            return result


class RelativeProduct:
    """The simultaneous action on fiber pairs over a shared base point.

    Carries the uniform joining (mass ``1/(N*M*M)`` per triple) on the grid of
    triples ``(z, y, y')``.  Construction asserts: the action is a bijection,
    both coordinate projections push the joining to the uniform grid measure,
    the diagonal ``y == y'`` is invariant with mass exactly ``1/M``, and the
    coordinate flip commutes with the action.
    """

    def __init__(self, system: SkewSystem):
        self.system = system
        n = system.base_resolution
        m = system.fiber_resolution
        self.n_points = n * m * m

        p = np.arange(self.n_points, dtype=np.int64)
        z = p // (m * m)
        y = (p % (m * m)) // m
        yp = p % m
        cocycle = system.cocycle.table()
        base = np.array(system.base_map.images, dtype=np.int64)
        action = base[z] * m * m + cocycle[z, y] * m + cocycle[z, yp]

        # first/second coordinate projections to two-coordinate grid indices
        self.first_index = z * m + y
        self.second_index = z * m + yp
        flip = z * m * m + yp * m + y

        if np.bincount(action, minlength=self.n_points).max() != 1:
            raise StructuralError("triple action is not a bijection")
        if (np.bincount(self.first_index, minlength=n * m) != m).any():
            raise StructuralError("first projection does not push to the grid measure")
        if (np.bincount(self.second_index, minlength=n * m) != m).any():
            raise StructuralError("second projection does not push to the grid measure")
        diag = y == yp
        if int(diag.sum()) * m != self.n_points:
            raise StructuralError("diagonal mass is not 1/M")
        if not diag[action[diag]].all():
            raise StructuralError("diagonal is not invariant")
        if (flip[action] != action[flip]).any():
            raise StructuralError("flip does not commute with the action")

        self.action = action
        self.diagonal_mask = diag
        for arr in (self.action, self.first_index, self.second_index, self.diagonal_mask):
            arr.setflags(write=False)

    @property
    def point_mass(self) -> Fraction:
        return Fraction(1, self.n_points)

    def diagonal_mass(self) -> Fraction:
        return Fraction(int(self.diagonal_mask.sum()), self.n_points)


def relative_product(system: SkewSystem) -> RelativeProduct:
    return RelativeProduct(system)


@dataclass(frozen=True)
class OrbitStructure:
    diagonal_census: tuple[int, ...]
    off_diagonal_census: tuple[int, ...]
    flip_pairing: bool


def _part_cycles(action: list[int], part: list[int]) -> list[list[int]]:
    in_part = set(part)
    seen: set[int] = set()
    out = []
    for start in part:
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        j = action[start]
        while j != start:
            if j not in in_part:
                raise StructuralError("part is not invariant under the action")
            cyc.append(j)
            seen.add(j)
            j = action[j]
        out.append(cyc)
    return out


def orbit_structure(product: RelativeProduct) -> OrbitStructure:
    """Cycle censuses of the triple action split into its diagonal and
    off-diagonal invariant parts, plus the flip-pairing check."""
    action = product.action.tolist()
    diag = np.flatnonzero(product.diagonal_mask).tolist()
    off = np.flatnonzero(~product.diagonal_mask).tolist()

    diag_cycles = _part_cycles(action, diag)
    off_cycles = _part_cycles(action, off)

    m = product.system.fiber_resolution
    mm = m * m

    def flip_point(p: int) -> int:
        z, rem = divmod(p, mm)
        y, yp = divmod(rem, m)
        return z * mm + yp * m + y

    cycle_sets = {frozenset(c) for c in off_cycles}
    pairing = all(frozenset(flip_point(p) for p in c) in cycle_sets for c in off_cycles)
    if not pairing:
        raise StructuralError("flip does not pair off-diagonal cycles")

    return OrbitStructure(
        diagonal_census=tuple(sorted(len(c) for c in diag_cycles)),
        off_diagonal_census=tuple(sorted(len(c) for c in off_cycles)),
        flip_pairing=pairing,
    )


def ergodicity_defect(product: RelativeProduct) -> Fraction:
    """One minus the largest off-diagonal orbit's share of off-diagonal mass.

    Zero means the off-diagonal part is a single orbit, the strongest
    relative-mixing signal the finite model can emit.  The diagonal is
    excluded: it is an artifact of finite resolution and is never mixed away.
    """
    if product.system.fiber_resolution < 2:
        raise DegenerateFiberError("off-diagonal part is empty for M < 2")
    structure = orbit_structure(product)
    total = sum(structure.off_diagonal_census)
    largest = max(structure.off_diagonal_census)
    return 1 - Fraction(largest, total)


SKEW_HEADER = "ergolab-skew v1"


def skew_to_text(system: SkewSystem) -> str:
    """Canonical text form; round trips bit-exactly through skew_from_text."""
    lines = [
        SKEW_HEADER,
        f"N {system.base_resolution}",
        f"M {system.fiber_resolution}",
        " ".join(str(i) for i in system.base_map.images),
    ]
    lines.extend(
        " ".join(str(i) for i in m.images) for m in system.cocycle.maps
    )
    return "\n".join(lines) + "\n"


def skew_from_text(text: str) -> SkewSystem:
    lines = text.splitlines()
    if len(lines) < 4 or lines[0] != SKEW_HEADER:
        raise ValueError("not an ergolab-skew v1 document")
    n_tag, n_str = lines[1].split()
    m_tag, m_str = lines[2].split()
    if n_tag != "N" or m_tag != "M":
        raise ValueError("missing N/M header lines")
    n, m = int(n_str), int(m_str)
    if len(lines) != 4 + n:
        raise ValueError(f"expected {4 + n} lines, got {len(lines)}")
    base_space, fiber_space = CellSpace(n), CellSpace(m)
    base = Automorphism(base_space, tuple(int(t) for t in lines[3].split()))
    maps = tuple(
        Automorphism(fiber_space, tuple(int(t) for t in line.split()))
        for line in lines[4:]
    )
    return make_skew(base, Cocycle(base_space, fiber_space, maps))
