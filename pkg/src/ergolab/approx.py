"""Piecewise-constant skew systems and greedy approximation of a cocycle.

A piecewise spec is a base partition plus one fiber representative per label,
with label 0 reserved for the identity.  Approximation is first-fit greedy
clustering of the cocycle values under the Hamming metric: deterministic,
linear, and within ``eps`` of every cell's map by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import Automorphism, Partition, identity
from .errors import DimensionMismatchError, StructuralError
from .skew import Cocycle, SkewSystem, make_skew


@dataclass(frozen=True)
class PiecewiseSpec:
    """One fiber representative per partition label; ``reps[0]`` is the
    identity (its cell may be empty)."""

    partition: Partition
    reps: tuple[Automorphism, ...]

    def __post_init__(self) -> None:
        if len(self.reps) != self.partition.num_labels:
            raise StructuralError(
                f"{self.partition.num_labels} labels but {len(self.reps)} representatives"
            )
        if self.reps[0] != identity(self.reps[0].space):
            raise StructuralError("representative 0 must be the identity")
        fiber = self.reps[0].space
        if any(r.space != fiber for r in self.reps):
            raise DimensionMismatchError("representatives on mixed fiber spaces")

    @property
    def fiber_space(self):
        return self.reps[0].space


def make_piecewise(base_map: Automorphism, spec: PiecewiseSpec) -> SkewSystem:
    """The skew system whose fiber map over ``z`` is the representative of
    ``z``'s label."""
    if base_map.space != spec.partition.space:
        raise DimensionMismatchError("spec partition lives on a different base")
    maps = tuple(spec.reps[l] for l in spec.partition.labels)
    return make_skew(base_map, Cocycle(base_map.space, spec.fiber_space, maps))


def piecewise_approximate(system: SkewSystem, eps: Fraction) -> PiecewiseSpec:
    """Cluster the cocycle values to within Hamming distance ``eps``.

    Base cells are scanned in ascending index order; each cocycle value joins
    the first cluster whose representative is strictly closer than ``eps``,
    else opens a new cluster with itself as representative.  Cluster 0 holds
    the identity and is used only by values within ``eps`` of it.  Guarantee:
    ``hamming_distance(maps[z], reps[label(z)]) < eps`` for every ``z``.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    m = system.fiber_resolution
    n = system.base_resolution

    # mismatches/M < eps  <=>  mismatches * eps.denominator < eps.numerator * M
    mismatch_bound = eps.numerator * m
    scale = eps.denominator

    reps: list[Automorphism] = [identity(system.cocycle.fiber_space)]
    rep_rows = np.empty((n + 1, m), dtype=np.int64)
    rep_rows[0] = np.arange(m)
    labels = []
    for z in range(n):
        value = system.cocycle.maps[z]
        row = np.asarray(value.images, dtype=np.int64)
        mism = (rep_rows[: len(reps)] != row).sum(axis=1)
        hits = np.flatnonzero(mism * scale < mismatch_bound)
        if hits.size:
            labels.append(int(hits[0]))
        else:
            rep_rows[len(reps)] = row
            reps.append(value)
            labels.append(len(reps) - 1)

    return PiecewiseSpec(
        Partition(system.base_map.space, tuple(labels)), tuple(reps)
    )
