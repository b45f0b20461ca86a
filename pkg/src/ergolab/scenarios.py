"""Named experiment scenarios and the seeded genericity sampling run.

Every scenario is fully determined by its parameters and seed.  Seed
derivation for sampled trials is ``(seed * 1000003 + trial) mod 2**32``,
fixed so runs are reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    Automorphism,
    CellSet,
    CellSpace,
    Partition,
    contiguous_chunks,
    full_cells,
    identity,
    rotation,
)
from .approx import PiecewiseSpec, make_piecewise
from .errors import ConfigError
from .mixing import TestSet, dn_curve
from .skew import (
    SkewSystem,
    constant_cocycle,
    ergodicity_defect,
    make_skew,
    relative_product,
)

SCENARIO_NAMES = (
    "trivial",
    "compact",
    "product_wm",
    "random_piecewise",
    "conjugation_demo",
)


@dataclass(frozen=True)
class Scenario:
    name: str
    base_resolution: int
    fiber_resolution: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.name not in SCENARIO_NAMES:
            raise ConfigError(
                f"unknown scenario {self.name!r}; pick one of {', '.join(SCENARIO_NAMES)}"
            )
        if self.base_resolution < 1 or self.fiber_resolution < 1:
            raise ConfigError("N and M must be >= 1")

    def system_id(self) -> str:
        return f"{self.name}-N{self.base_resolution}-M{self.fiber_resolution}-s{self.seed}"


def doubling_map(fiber: CellSpace) -> Automorphism:
    """y -> 2y mod M; a permutation exactly when M is odd."""
    m = fiber.resolution
    if m % 2 == 0:
        raise ConfigError("doubling map needs odd M")
    return Automorphism(fiber, tuple((2 * y) % m for y in range(m)))


def random_piecewise_spec(
    base: CellSpace, fiber: CellSpace, rng: np.random.RandomState
) -> PiecewiseSpec:
    """Seeded piecewise data: dyadic base chunks at a drawn depth in {1,2,3},
    one uniform random representative per chunk.

    Labels start at 1; label 0 keeps the identity convention with an empty
    cell.
    """
    depth = int(rng.randint(1, 4))
    chunks = contiguous_chunks(base.resolution, min(2**depth, base.resolution))
    labels = [0] * base.resolution
    for j, chunk in enumerate(chunks, start=1):
        for z in chunk:
            labels[z] = j
    reps = [identity(fiber)]
    reps.extend(
        Automorphism(fiber, tuple(int(i) for i in rng.permutation(fiber.resolution)))
        for _ in chunks
    )
    return PiecewiseSpec(Partition(base, tuple(labels)), tuple(reps))


def scenario_build(scenario: Scenario) -> SkewSystem:
    """Construct the scenario's system over a single-N-cycle base."""
    base_space = CellSpace(scenario.base_resolution)
    fiber_space = CellSpace(scenario.fiber_resolution)
    base = rotation(base_space)
    name = scenario.name

    if name == "trivial":
        return make_skew(base, constant_cocycle(base_space, identity(fiber_space)))
    if name == "compact":
        return make_skew(base, constant_cocycle(base_space, rotation(fiber_space)))
    if name == "product_wm":
        return make_skew(base, constant_cocycle(base_space, doubling_map(fiber_space)))

    rng = np.random.RandomState(scenario.seed % 2**32)
    if name == "random_piecewise":
        spec = random_piecewise_spec(base_space, fiber_space, rng)
        return make_piecewise(base, spec)
    # conjugation_demo: an arbitrary extension, one random fiber map per cell
    from .skew import Cocycle

    maps = tuple(
        Automorphism(fiber_space, tuple(int(i) for i in rng.permutation(fiber_space.resolution)))
        for _ in range(base_space.resolution)
    )
    return make_skew(base, Cocycle(base_space, fiber_space, maps))


def canonical_pair(n: int, m: int) -> TestSet:
    """Z x (first ceil(M/2) fiber cells); the standing test set for sampling."""
    base_space, fiber_space = CellSpace(n), CellSpace(m)
    half = CellSet(fiber_space, frozenset(range((m + 1) // 2)))
    return TestSet.product(full_cells(base_space), half)


@dataclass(frozen=True)
class SampleRow:
    trial: int
    label: str
    defect: Fraction
    dn_value: object
    eps: Fraction
    member: bool


def derive_seed(seed: int, trial: int) -> int:
    return (seed * 1_000_003 + trial) % 2**32


def _measure(system: SkewSystem, pair: TestSet, n_steps: int, eps: Fraction, exact: bool):
    product = relative_product(system)
    defect = ergodicity_defect(product)
    curve = dn_curve(system, pair, pair, n_steps, exact=exact, product=product)
    value = curve[-1]
    member = value < eps * eps if exact else value < (eps.numerator / eps.denominator)
    return defect, value, member


def genericity_sample(
    base: Automorphism,
    trials: int,
    fiber_resolution: int,
    seed: int,
    n_steps: int,
    eps: Fraction,
    exact: bool = False,
    threads: int = 1,
) -> list[SampleRow]:
    """Seeded random piecewise extensions of the given base, measured against
    the three built-in baselines.

    Baselines ride along under reserved trial indices: -1 trivial, -2
    compact, -3 the weakly-mixing product stand-in (omitted when M is even,
    since the doubling map needs odd M).  Rows are ordered baselines first,
    then trials ascending; thread count changes wall time only.
    """
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if fiber_resolution < 2:
        raise ConfigError("sampling needs M >= 2")
    m = fiber_resolution
    base_space = base.space
    fiber_space = CellSpace(m)
    eps = Fraction(eps)
    pair = canonical_pair(base_space.resolution, m)

    def piecewise_system(trial: int) -> SkewSystem:
        rng = np.random.RandomState(derive_seed(seed, trial))
        return make_piecewise(base, random_piecewise_spec(base_space, fiber_space, rng))

    baselines: list[tuple[int, str, SkewSystem]] = [
        (-1, "trivial", make_skew(base, constant_cocycle(base_space, identity(fiber_space)))),
        (-2, "compact", make_skew(base, constant_cocycle(base_space, rotation(fiber_space)))),
    ]
    if m % 2 == 1:
        baselines.append(
            (-3, "product_wm", make_skew(base, constant_cocycle(base_space, doubling_map(fiber_space))))
        )

    jobs: list[tuple[int, str, SkewSystem]] = baselines + [
        (t, "random_piecewise", piecewise_system(t)) for t in range(trials)
    ]

    def run(job: tuple[int, str, SkewSystem]) -> SampleRow:
        trial, label, system = job
        defect, value, member = _measure(system, pair, n_steps, eps, exact)
        return SampleRow(trial, label, defect, value, eps, member)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, jobs))
    return [run(job) for job in jobs]
