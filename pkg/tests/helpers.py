"""Shared builders for seeded test instances."""

from __future__ import annotations

import numpy as np

import ergolab as eg


def random_perm(space: eg.CellSpace, rng) -> eg.Automorphism:
    return eg.Automorphism(space, tuple(int(i) for i in rng.permutation(space.resolution)))


def random_system(n: int, m: int, seed: int, single_cycle: bool = True) -> eg.SkewSystem:
    """Seeded system: rotation (or random permutation) base, fully random cocycle."""
    rng = np.random.RandomState(seed)
    base_space = eg.CellSpace(n)
    fiber_space = eg.CellSpace(m)
    base = eg.rotation(base_space) if single_cycle else random_perm(base_space, rng)
    maps = tuple(random_perm(fiber_space, rng) for _ in range(n))
    return eg.make_skew(base, eg.Cocycle(base_space, fiber_space, maps))


def random_conjugator(n: int, m: int, seed: int) -> eg.Conjugator:
    rng = np.random.RandomState(seed)
    base_space = eg.CellSpace(n)
    fiber_space = eg.CellSpace(m)
    maps = tuple(random_perm(fiber_space, rng) for _ in range(n))
    return eg.Conjugator(eg.Cocycle(base_space, fiber_space, maps))


def random_cell_set(space: eg.CellSpace, rng) -> eg.CellSet:
    picks = rng.randint(0, 2, size=space.resolution)
    return eg.CellSet(space, frozenset(int(i) for i in np.flatnonzero(picks)))


def random_test_set(n: int, m: int, rng) -> eg.TestSet:
    picks = rng.randint(0, 2, size=n * m)
    return eg.TestSet(n, m, frozenset(int(i) for i in np.flatnonzero(picks)))
