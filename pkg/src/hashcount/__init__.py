"""Approximate model counting for DNF formulas.

The main entry points are :func:`approx_count` (hashing-based estimator with
a multiplicative accuracy guarantee), :func:`exact_count` (brute force, small
instances), and the baseline counters :func:`klm_count` and
:func:`approxmc2_dnf_count`.  ``kernel_impl()`` reports whether the compiled
kernels or the pure-Python fallback are active.
"""

from ._kernels import IMPL_NAME, available_impls
from .baselines import MonteCarloEstimate, approxmc2_dnf_count, ge_bsat, klm_count
from .counter import (
    CellEstimate,
    CounterParams,
    CountEstimate,
    RoundOutcome,
    RoundStats,
    SymbolicUniverse,
    approx_count,
    bsat,
    build_universe,
    check_sat,
    core,
    decode_state,
    exact_cell_count,
    interpret,
    log_sat_search,
)
from .formula import (
    BRUTE_FORCE_LIMIT,
    Cube,
    DnfFormula,
    DnfParseError,
    Literal,
    coverage,
    cube_satisfies,
    exact_count,
    gen_random,
    parse_dnf,
    satisfies,
    serialize_dnf,
)
from .gf2 import BitMat, BitVec, RandomSource, enumerate_solutions, next_gray_bit, rref
from .hashing import (
    BaseSample,
    RexHash,
    UniversalityReport,
    XorHash,
    cell_members,
    enum_next_rex,
    extract,
    sample_base,
    sample_hxor,
    verify_universality,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "kernel_impl",
    "available_impls",
    # formulas
    "Literal",
    "Cube",
    "DnfFormula",
    "DnfParseError",
    "parse_dnf",
    "serialize_dnf",
    "gen_random",
    "exact_count",
    "cube_satisfies",
    "satisfies",
    "coverage",
    "BRUTE_FORCE_LIMIT",
    # GF(2) + randomness
    "BitVec",
    "BitMat",
    "rref",
    "enumerate_solutions",
    "next_gray_bit",
    "RandomSource",
    # hashing
    "XorHash",
    "BaseSample",
    "RexHash",
    "sample_hxor",
    "sample_base",
    "extract",
    "enum_next_rex",
    "cell_members",
    "verify_universality",
    "UniversalityReport",
    # counting
    "SymbolicUniverse",
    "build_universe",
    "decode_state",
    "interpret",
    "CounterParams",
    "check_sat",
    "bsat",
    "exact_cell_count",
    "log_sat_search",
    "core",
    "approx_count",
    "CellEstimate",
    "RoundStats",
    "RoundOutcome",
    "CountEstimate",
    # baselines
    "klm_count",
    "MonteCarloEstimate",
    "ge_bsat",
    "approxmc2_dnf_count",
]


def kernel_impl() -> str:
    """Name of the active kernel implementation: 'native' or 'python'."""
    return IMPL_NAME
