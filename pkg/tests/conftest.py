"""Shared oracles: brute-force reference implementations the tests trust."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Set

import pytest

from hashcount.counter import SymbolicUniverse, interpret
from hashcount.formula import Cube, DnfFormula, Literal, coverage
from hashcount.gf2 import BitMat, BitVec, mat_vec_mul


def mat(int_rows, cols: int) -> BitMat:
    """BitMat from integer row bit patterns (bit 0 = first coordinate)."""
    return BitMat.from_rows([BitVec(cols, r) for r in int_rows], cols)


def bruteforce_models(phi: DnfFormula) -> Set[int]:
    """All satisfying assignments as ints, by full enumeration."""
    out = set()
    masks = [c.mask for c in phi.cubes]
    pats = [c.pattern for c in phi.cubes]
    for x in range(1 << phi.n):
        if any((x & mk) == pt for mk, pt in zip(masks, pats)):
            out.add(x)
    return out


def bruteforce_system_solutions(a, b: BitVec, y: BitVec) -> Set[int]:
    """All q-bit x with A.x xor b = y, by full enumeration."""
    out = set()
    for xi in range(1 << a.cols):
        x = BitVec(a.cols, xi)
        lhs = mat_vec_mul(a, x)
        if lhs.bits ^ b.bits == y.bits:
            out.add(xi)
    return out


def coverage_sum(phi: DnfFormula, universe: SymbolicUniverse) -> Fraction:
    """Exact sum of 1/|cov(x)| over all valid universe states."""
    total = Fraction(0)
    for s in range(universe.size):
        z = BitVec(universe.q, s)
        pair = interpret(universe, phi, z)
        assert pair is not None
        x, _i = pair
        total += Fraction(1, len(coverage(phi, x)))
    return total


def example_formula() -> DnfFormula:
    """(x1 and not x2) or (x3) over 3 variables; exactly 5 models."""
    return DnfFormula(
        3,
        (
            Cube((Literal(0, True), Literal(1, False))),
            Cube((Literal(2, True),)),
        ),
    )


@pytest.fixture
def phi_example() -> DnfFormula:
    return example_formula()


def cell_states(h) -> List[int]:
    """Cell members of a RexHash as integers, via the Gray walk."""
    from hashcount.hashing import cell_members

    return [int(z) for z in cell_members(h)]
