"""Rohlin towers for a base permutation, and their refinement by a partition.

A tower is a disjoint family ``B, T0(B), ..., T0^(n-1)(B)`` covering all but
an exact error mass.  Construction is deterministic: within every cycle the
marking starts at the minimal-index cell, so towers (and everything built on
them) are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Automorphism, CellSet, Partition, cycles
from .errors import AperiodicityError, StructuralError, TowerTooCoarseError


@dataclass(frozen=True)
class Tower:
    base_set: CellSet
    height: int
    levels: tuple[CellSet, ...]
    error_set: CellSet
    error_mass: Fraction


@dataclass(frozen=True)
class TowerColumn:
    """A block of base cells whose level-i images share partition label
    ``labels[i]`` for every i."""

    cells: CellSet
    labels: tuple[int, ...]


@dataclass(frozen=True)
class RefinedTower:
    tower: Tower
    columns: tuple[TowerColumn, ...]


def build_tower(t0: Automorphism, height: int, eps: Fraction) -> Tower:
    """Build the canonical tower of the given height under ``t0``.

    Every cycle must be at least ``height`` long (the aperiodicity surrogate).
    Per cycle of length L the walk from the minimal-index cell marks every
    ``height``-th cell for ``floor(L/height)`` blocks; the trailing
    ``L mod height`` cells become error.  The exact error mass is
    ``sum(L mod height) / N``; if it reaches ``eps`` the construction fails
    and reports the achievable error.
    """
    if height < 1:
        raise ValueError(f"height must be >= 1, got {height}")
    n = t0.space.resolution
    cycle_list = cycles(t0)
    short = [len(c) for c in cycle_list if len(c) < height]
    if short:
        raise AperiodicityError(
            f"cycle of length {min(short)} is shorter than height {height}"
        )

    error_cells = sum(len(c) % height for c in cycle_list)
    error_mass = Fraction(error_cells, n)
    if error_mass >= eps:
        raise TowerTooCoarseError(error_mass, eps)

    level_cells: list[set[int]] = [set() for _ in range(height)]
    error: set[int] = set()
    for cyc in cycle_list:
        blocks = len(cyc) // height
        for pos, cell in enumerate(cyc):
            if pos < blocks * height:
                level_cells[pos % height].add(cell)
            else:
                error.add(cell)

    space = t0.space
    tower = Tower(
        base_set=CellSet(space, frozenset(level_cells[0])),
        height=height,
        levels=tuple(CellSet(space, frozenset(lc)) for lc in level_cells),
        error_set=CellSet(space, frozenset(error)),
        error_mass=error_mass,
    )
    _check_tower(tower, t0)
    return tower


def _check_tower(tower: Tower, t0: Automorphism) -> None:
    """Exhaustive invariant check, run after every construction."""
    n = t0.space.resolution
    covered: set[int] = set()
    for level in tower.levels:
        if covered & level.members:
            raise StructuralError("tower levels are not pairwise disjoint")
        covered |= level.members
    for i in range(tower.height - 1):
        image = {t0.images[c] for c in tower.levels[i].members}
        if image != tower.levels[i + 1].members:
            raise StructuralError(f"level {i} does not map onto level {i + 1}")
    if tower.error_set.members != set(range(n)) - covered:
        raise StructuralError("error set is not the complement of the levels")
    if tower.error_mass != 1 - tower.height * tower.base_set.mass:
        raise StructuralError("error mass disagrees with 1 - n*mass(base)")


def refine_tower(tower: Tower, t0: Automorphism, partition: Partition) -> RefinedTower:
    """Split the base by the word of partition labels read up the tower.

    Base cells sharing the label word ``(label(z), label(T0 z), ...,
    label(T0^(n-1) z))`` form one column; columns are ordered by word.
    """
    if partition.space != t0.space:
        raise StructuralError("partition lives on a different space")
    groups: dict[tuple[int, ...], set[int]] = {}
    for b in sorted(tower.base_set.members):
        word = []
        z = b
        for _ in range(tower.height):
            word.append(partition.labels[z])
            z = t0.images[z]
        groups.setdefault(tuple(word), set()).add(b)

    columns = tuple(
        TowerColumn(CellSet(t0.space, frozenset(cells)), word)
        for word, cells in sorted(groups.items())
    )
    refined = RefinedTower(tower, columns)
    _check_refinement(refined, t0, partition)
    return refined


def _check_refinement(rt: RefinedTower, t0: Automorphism, partition: Partition) -> None:
    seen: set[int] = set()
    for col in rt.columns:
        if seen & col.cells.members:
            raise StructuralError("columns overlap")
        seen |= col.cells.members
        for b in col.cells.members:
            z = b
            for i in range(rt.tower.height):
                if partition.labels[z] != col.labels[i]:
                    raise StructuralError("column word disagrees with the partition")
                z = t0.images[z]
    if seen != rt.tower.base_set.members:
        raise StructuralError("columns do not partition the base")
