"""Exact permutation-model workbench for relative ergodic theory experiments.

Everything is finite and exact: the unit interval becomes N equal cells,
automorphisms become permutations, masses and distances are rationals.  On
top of that sit skew products over a fixed base, Rohlin towers and their
refinements, fiber-preserving conjugators, ergodic-average mixing statistics
on the fiber-product joining, and a seeded experiment CLI.
"""

from .core import (
    Automorphism,
    CellSet,
    CellSpace,
    Partition,
    apply_set,
    compose,
    cycle_census,
    cycles,
    dyadic_family,
    full_cells,
    hamming_distance,
    identity,
    invert,
    perm_from_text,
    perm_to_text,
    random_automorphism,
    rotation,
    weak_distance,
)
from .errors import (
    AperiodicityError,
    ConfigError,
    DegenerateFiberError,
    DimensionMismatchError,
    ErgolabError,
    StructuralError,
    TowerTooCoarseError,
    VerificationError,
)
from .skew import (
    Cocycle,
    OrbitStructure,
    RelativeProduct,
    SkewSystem,
    constant_cocycle,
    ergodicity_defect,
    flatten,
    grid_space,
    identity_cocycle,
    make_skew,
    orbit_structure,
    relative_product,
    return_map,
    skew_from_text,
    skew_to_text,
)
from .towers import RefinedTower, Tower, TowerColumn, build_tower, refine_tower
from .approx import PiecewiseSpec, make_piecewise, piecewise_approximate
from .conjugation import (
    ClosenessReport,
    Conjugator,
    PipelineResult,
    as_system,
    assert_level_equality,
    build_conjugator,
    conjugate,
    conjugation_pipeline,
    verify_closeness,
)
from .mixing import (
    PairResult,
    TestSet,
    WMReport,
    conditional_expectation,
    dn_curve,
    dn_statistic,
    dn_statistic_sq,
    product_constant,
    product_dyadic_family,
    transport,
    wm_membership,
    wm_profile,
)
from .scenarios import (
    SCENARIO_NAMES,
    SampleRow,
    Scenario,
    canonical_pair,
    derive_seed,
    doubling_map,
    genericity_sample,
    random_piecewise_spec,
    scenario_build,
)
from .cli import main as run_cli

__version__ = "0.1.0"
