"""Ergodic-average statistics for relative weak mixing on the fiber product.

The central quantity is the deviation, in L2 of the joining, of the Cesaro
average of pair-indicator products from its conditionally-independent
constant.  Per-point hit counts are integers, so exact mode is pure integer
arithmetic with a single rational division at the end; float mode differs
only in the final division and square root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import Automorphism, CellSet, CellSpace, contiguous_chunks
from .errors import DimensionMismatchError
from .skew import RelativeProduct, SkewSystem, relative_product


@dataclass(frozen=True)
class TestSet:
    """A subset of the two-coordinate grid, stored as point indices z*M + y.

    Product-structured sets come from :meth:`product`; arbitrary point lists
    from :meth:`from_pairs`.
    """

    base_resolution: int
    fiber_resolution: int
    points: frozenset[int]

    def __post_init__(self) -> None:
        size = self.base_resolution * self.fiber_resolution
        if any(not 0 <= p < size for p in self.points):
            raise ValueError("grid point index out of range")

    @classmethod
    def product(cls, base_part: CellSet, fiber_part: CellSet) -> "TestSet":
        n = base_part.space.resolution
        m = fiber_part.space.resolution
        pts = frozenset(
            z * m + y for z in base_part.members for y in fiber_part.members
        )
        return cls(n, m, pts)

    @classmethod
    def from_pairs(cls, n: int, m: int, pairs) -> "TestSet":
        return cls(n, m, frozenset(z * m + y for z, y in pairs))

    @property
    def mass(self) -> Fraction:
        return Fraction(len(self.points), self.base_resolution * self.fiber_resolution)

    def indicator(self) -> np.ndarray:
        out = np.zeros(self.base_resolution * self.fiber_resolution, dtype=bool)
        if self.points:
            out[sorted(self.points)] = True
        return out


def _require_same_grid(a: TestSet, b: TestSet) -> None:
    if (a.base_resolution, a.fiber_resolution) != (b.base_resolution, b.fiber_resolution):
        raise DimensionMismatchError("test sets on different grids")


def transport(grid_map: Automorphism, a: TestSet) -> TestSet:
    """Image of a test set under a grid automorphism (same index layout)."""
    if grid_map.space.resolution != a.base_resolution * a.fiber_resolution:
        raise DimensionMismatchError("grid automorphism resolution mismatch")
    return TestSet(
        a.base_resolution,
        a.fiber_resolution,
        frozenset(grid_map.images[p] for p in a.points),
    )


def conditional_expectation(a: TestSet) -> tuple[Fraction, ...]:
    """Per base cell, the exact fraction of its fiber contained in the set."""
    m = a.fiber_resolution
    counts = [0] * a.base_resolution
    for p in a.points:
        counts[p // m] += 1
    return tuple(Fraction(c, m) for c in counts)


def product_constant(a: TestSet, b: TestSet) -> Fraction:
    """Base average of the product of the two conditional expectations.

    Equals the joining mass of the pair event {first coordinate in a, second
    in b}; this identity is what makes the fiber product the relatively
    independent joining.
    """
    _require_same_grid(a, b)
    ea = conditional_expectation(a)
    eb = conditional_expectation(b)
    return Fraction(sum(x * y for x, y in zip(ea, eb)), a.base_resolution)


def _check_grid(system: SkewSystem, a: TestSet, b: TestSet) -> None:
    _require_same_grid(a, b)
    if (a.base_resolution, a.fiber_resolution) != (
        system.base_resolution,
        system.fiber_resolution,
    ):
        raise DimensionMismatchError("test sets do not match the system grid")


def _hit_counts(
    product: RelativeProduct, a: TestSet, b: TestSet, n_steps: int
) -> np.ndarray:
    """Per triple, the number of steps 0..n_steps-1 at which the orbit's
    first coordinate lies in ``a`` and its second in ``b``.  Exact integers."""
    fa = a.indicator()[product.first_index]
    fb = b.indicator()[product.second_index]
    joint = (fa & fb).astype(np.int64)
    pos = np.arange(product.n_points, dtype=np.int64)
    hits = np.zeros(product.n_points, dtype=np.int64)
    for _ in range(n_steps):
        hits += joint[pos]
        pos = product.action[pos]
    return hits


def _sq_from_hits(hits, n_steps: int, c: Fraction, n_points: int) -> Fraction:
    # sum((h/s - p/q)^2)/G  ==  sum((h*q - s*p)^2) / (G * s^2 * q^2)
    p, q = c.numerator, c.denominator
    num = sum((int(h) * q - n_steps * p) ** 2 for h in hits)
    return Fraction(num, n_points * n_steps * n_steps * q * q)


def dn_statistic_sq(
    system: SkewSystem, a: TestSet, b: TestSet, n_steps: int
) -> Fraction:
    """Exact squared deviation of the Cesaro average from the product
    constant, averaged over the joining.  Intended for grids with
    N*M*M <= 10**4."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    _check_grid(system, a, b)
    product = relative_product(system)
    hits = _hit_counts(product, a, b, n_steps)
    return _sq_from_hits(hits, n_steps, product_constant(a, b), product.n_points)


def dn_statistic(
    system: SkewSystem, a: TestSet, b: TestSet, n_steps: int
) -> float:
    """Double-precision square root of the squared deviation; hit counts stay
    exact, only the final arithmetic is floating point."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    _check_grid(system, a, b)
    product = relative_product(system)
    hits = _hit_counts(product, a, b, n_steps)
    c = product_constant(a, b)
    dev = hits / float(n_steps) - (c.numerator / c.denominator)
    return math.sqrt(float(np.mean(dev * dev)))


def dn_curve(
    system: SkewSystem,
    a: TestSet,
    b: TestSet,
    n_max: int,
    exact: bool = False,
    product: Optional[RelativeProduct] = None,
):
    """Statistic values for every step count 1..n_max in one orbit sweep.

    Float mode returns a list of floats; exact mode a list of Fractions
    holding the squared values.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    _check_grid(system, a, b)
    if product is None:
        product = relative_product(system)
    fa = a.indicator()[product.first_index]
    fb = b.indicator()[product.second_index]
    joint = (fa & fb).astype(np.int64)
    c = product_constant(a, b)
    c_float = c.numerator / c.denominator
    pos = np.arange(product.n_points, dtype=np.int64)
    hits = np.zeros(product.n_points, dtype=np.int64)
    out = []
    for s in range(1, n_max + 1):
        hits += joint[pos]
        pos = product.action[pos]
        if exact:
            out.append(_sq_from_hits(hits.tolist(), s, c, product.n_points))
        else:
            dev = hits / float(s) - c_float
            out.append(math.sqrt(float(np.mean(dev * dev))))
    return out


def wm_membership(
    system: SkewSystem,
    a: TestSet,
    b: TestSet,
    eps: Fraction,
    n_max: int,
    exact: bool = False,
    product: Optional[RelativeProduct] = None,
) -> Optional[int]:
    """Smallest step count <= n_max whose statistic drops below ``eps``, or
    None.  Exact mode compares squared values as rationals."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    eps = Fraction(eps)
    curve = dn_curve(system, a, b, n_max, exact=exact, product=product)
    if exact:
        target = eps * eps
        for s, value in enumerate(curve, start=1):
            if value < target:
                return s
    else:
        threshold = eps.numerator / eps.denominator
        for s, value in enumerate(curve, start=1):
            if value < threshold:
                return s
    return None


def _scaled_chunks(resolution: int) -> list[list[frozenset[int]]]:
    """Dyadic ranges grouped by scale: scale 0 is the whole space, each next
    scale halves (greedy split off powers of two)."""
    scales = [[frozenset(range(resolution))]]
    scale = 1
    while len(scales[-1]) < resolution:
        chunks = contiguous_chunks(resolution, min(2**scale, resolution))
        scales.append([frozenset(c) for c in chunks])
        scale += 1
    return scales


def product_dyadic_family(
    base_space: CellSpace, fiber_space: CellSpace, depth: int
) -> list[TestSet]:
    """Products of base and fiber dyadic ranges, enumerated diagonally by
    total scale 0..depth.  Depth 0 yields only the full grid."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    n, m = base_space.resolution, fiber_space.resolution
    base_scales = _scaled_chunks(n)
    fiber_scales = _scaled_chunks(m)
    family = []
    for total in range(depth + 1):
        for sb in range(total + 1):
            sf = total - sb
            if sb >= len(base_scales) or sf >= len(fiber_scales):
                continue
            for cells_b in base_scales[sb]:
                for cells_f in fiber_scales[sf]:
                    family.append(
                        TestSet(
                            n, m, frozenset(z * m + y for z in cells_b for y in cells_f)
                        )
                    )
    return family


@dataclass(frozen=True)
class PairResult:
    a_index: int
    b_index: int
    eps: Fraction
    n_steps: int
    dn_value: object  # float, or Fraction of the squared value in exact mode
    member: bool


@dataclass(frozen=True)
class WMReport:
    system_id: str
    family_depth: int
    k_max: int
    n_max: int
    exact: bool
    pairs: tuple[PairResult, ...]
    defect: Optional[Fraction]
    diagonal_census: tuple[int, ...]
    off_diagonal_census: tuple[int, ...]

    def __post_init__(self) -> None:
        for r in self.pairs:
            sq = r.dn_value if self.exact else r.dn_value * r.dn_value
            if sq < 0:
                raise ValueError("statistic values cannot be negative")


def wm_profile(
    system: SkewSystem,
    family_depth: int,
    k_max: int,
    n_max: int,
    exact: bool = False,
    system_id: str = "system",
    threads: int = 1,
) -> WMReport:
    """Membership sweep over all ordered pairs from the product-dyadic family
    and thresholds 1/k for k = 1..k_max.

    For every pair one orbit sweep yields the whole statistic curve; each
    threshold then reads off the first step below it (clamped to ``n_max``
    with member=False when none is).  Thread count only affects wall time.
    """
    if family_depth < 0 or k_max < 1 or n_max < 1:
        raise ValueError("family_depth >= 0 and k_max, n_max >= 1 required")
    from .skew import ergodicity_defect, orbit_structure

    family = product_dyadic_family(
        system.base_map.space, system.cocycle.fiber_space, family_depth
    )
    product = relative_product(system)
    structure = orbit_structure(product)
    defect = (
        ergodicity_defect(product) if system.fiber_resolution >= 2 else None
    )

    index_pairs = [(i, j) for i in range(len(family)) for j in range(len(family))]

    def pair_rows(indices: tuple[int, int]) -> list[PairResult]:
        i, j = indices
        curve = dn_curve(system, family[i], family[j], n_max, exact=exact, product=product)
        rows = []
        for k in range(1, k_max + 1):
            eps = Fraction(1, k)
            found = None
            if exact:
                target = eps * eps
                for s, value in enumerate(curve, start=1):
                    if value < target:
                        found = s
                        break
            else:
                threshold = 1.0 / k
                for s, value in enumerate(curve, start=1):
                    if value < threshold:
                        found = s
                        break
            step = found if found is not None else n_max
            rows.append(
                PairResult(
                    a_index=i,
                    b_index=j,
                    eps=eps,
                    n_steps=step,
                    dn_value=curve[step - 1],
                    member=found is not None,
                )
            )
        return rows

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_pair = list(pool.map(pair_rows, index_pairs))
    else:
        per_pair = [pair_rows(ij) for ij in index_pairs]

    return WMReport(
        system_id=system_id,
        family_depth=family_depth,
        k_max=k_max,
        n_max=n_max,
        exact=exact,
        pairs=tuple(row for rows in per_pair for row in rows),
        defect=defect,
        diagonal_census=structure.diagonal_census,
        off_diagonal_census=structure.off_diagonal_census,
    )
