"""Fiber-preserving conjugation of a skew system toward a piecewise target.

The conjugator acts by ``(z, y) -> (z, kappa_z(y))``: it is trivial on the
base, so conjugating never leaves the family of extensions of the base map.
Built from a refined tower, the recursion forces the conjugated cocycle to
equal the target representative on levels ``0 .. n-2`` of every column; the
top level and the tower's error set absorb the mismatch, which bounds the
grid disagreement by ``1/n + error_mass``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .approx import PiecewiseSpec, make_piecewise, piecewise_approximate
from .core import compose, identity, invert
from .errors import DimensionMismatchError, StructuralError
from .skew import Cocycle, SkewSystem, flatten, make_skew
from .towers import RefinedTower, _check_tower, build_tower, refine_tower


@dataclass(frozen=True)
class Conjugator:
    """Base-trivial grid automorphism given by its fiber cocycle."""

    kappa: Cocycle

    def inverse(self) -> "Conjugator":
        return Conjugator(
            Cocycle(
                self.kappa.base_space,
                self.kappa.fiber_space,
                tuple(invert(k) for k in self.kappa.maps),
            )
        )


def as_system(q: Conjugator) -> SkewSystem:
    """The conjugator as a skew system over the identity base map."""
    return make_skew(identity(q.kappa.base_space), q.kappa)


def build_conjugator(
    system: SkewSystem, refined: RefinedTower, spec: PiecewiseSpec
) -> Conjugator:
    """Solve for the fiber maps column by column.

    Anchored at the identity on the column base, each step up the tower sets
    ``kappa`` at the next level so that the conjugated cocycle there equals
    the representative of the level's label.  Off the tower (error set) kappa
    stays the identity.
    """
    _check_pipeline_inputs(system, refined, spec)
    n = refined.tower.height
    t0 = system.base_map
    tau = system.cocycle.maps
    kappa = [identity(system.cocycle.fiber_space)] * system.base_resolution

    for col in refined.columns:
        for b in col.cells.members:
            z = b
            for i in range(n - 1):
                target = spec.reps[col.labels[i]]
                z_next = t0.images[z]
                kappa[z_next] = compose(
                    target, compose(kappa[z], invert(tau[z]))
                )
                z = z_next

    return Conjugator(
        Cocycle(system.base_map.space, system.cocycle.fiber_space, tuple(kappa))
    )


def _check_pipeline_inputs(
    system: SkewSystem, refined: RefinedTower, spec: PiecewiseSpec
) -> None:
    if spec.partition.space != system.base_map.space:
        raise StructuralError("spec partition is not on the system's base space")
    if spec.fiber_space != system.cocycle.fiber_space:
        raise StructuralError("spec representatives are not on the system's fiber")
    # the tower must really be a tower for this system's base map
    _check_tower(refined.tower, system.base_map)
    # the refinement must agree with the spec partition
    for col in refined.columns:
        if any(l >= len(spec.reps) for l in col.labels):
            raise StructuralError("column label outside the representative range")
        for b in col.cells.members:
            z = b
            for i in range(refined.tower.height):
                if spec.partition.labels[z] != col.labels[i]:
                    raise StructuralError(
                        "refined tower does not refine the spec partition"
                    )
                z = system.base_map.images[z]


def conjugate(q: Conjugator, system: SkewSystem) -> SkewSystem:
    """Return the conjugated system: same base map, cocycle
    ``kappa[T0 z] . maps[z] . kappa[z]^-1``.

    Flattened, this equals conjugation of the flattened system by the
    flattened conjugator, exactly.
    """
    if q.kappa.base_space != system.base_map.space:
        raise DimensionMismatchError("conjugator base resolution mismatch")
    if q.kappa.fiber_space != system.cocycle.fiber_space:
        raise DimensionMismatchError("conjugator fiber resolution mismatch")
    t0 = system.base_map
    maps = tuple(
        compose(
            q.kappa.maps[t0.images[z]],
            compose(system.cocycle.maps[z], invert(q.kappa.maps[z])),
        )
        for z in range(system.base_resolution)
    )
    return make_skew(t0, Cocycle(t0.space, system.cocycle.fiber_space, maps))


@dataclass(frozen=True)
class ClosenessReport:
    distance: Fraction
    bound: Fraction
    ok: bool


def verify_closeness(
    conjugated: SkewSystem,
    target: SkewSystem,
    height: int,
    tower_error: Fraction,
) -> ClosenessReport:
    """Exact fraction of grid points where the two systems act differently,
    against the exact bound ``1/height + tower_error``."""
    v = flatten(conjugated)
    r = flatten(target)
    if v.space != r.space:
        raise DimensionMismatchError("systems act on different grids")
    differing = sum(1 for a, b in zip(v.images, r.images) if a != b)
    distance = Fraction(differing, v.space.resolution)
    bound = Fraction(1, height) + Fraction(tower_error)
    return ClosenessReport(distance=distance, bound=bound, ok=distance <= bound)


def assert_level_equality(
    conjugated: SkewSystem, refined: RefinedTower, spec: PiecewiseSpec
) -> None:
    """Assert the conjugated cocycle equals the target representative on
    levels ``0 .. n-2`` of every column; raises if the identity fails."""
    t0 = conjugated.base_map
    for col in refined.columns:
        for b in col.cells.members:
            z = b
            for i in range(refined.tower.height - 1):
                if conjugated.cocycle.maps[z] != spec.reps[col.labels[i]]:
                    raise StructuralError(
                        f"conjugated cocycle differs from target on level {i}"
                    )
                z = t0.images[z]


@dataclass(frozen=True)
class PipelineResult:
    spec: PiecewiseSpec
    target: SkewSystem
    refined: RefinedTower
    conjugator: Conjugator
    conjugated: SkewSystem
    report: ClosenessReport


def conjugation_pipeline(
    system: SkewSystem,
    cluster_eps: Fraction,
    height: int,
    tower_eps: Fraction,
) -> PipelineResult:
    """Full pipeline: approximate, tower, refine, conjugate, verify.

    The returned report's ``ok`` flag records whether the measured distance
    stays within the ``1/height + error`` bound; the level-equality assertion
    makes a failure impossible unless an invariant is broken upstream.
    """
    spec = piecewise_approximate(system, Fraction(cluster_eps))
    target = make_piecewise(system.base_map, spec)
    tower = build_tower(system.base_map, height, Fraction(tower_eps))
    refined = refine_tower(tower, system.base_map, spec.partition)
    q = build_conjugator(system, refined, spec)
    conjugated = conjugate(q, system)
    assert_level_equality(conjugated, refined, spec)
    report = verify_closeness(conjugated, target, height, tower.error_mass)
    return PipelineResult(spec, target, refined, q, conjugated, report)
