"""DNF formulas: data model, normalization, file format, random instances, exact counting.

File format (one formula per file)::

    c optional comment lines anywhere
    p dnf <n> <m>
    <lit> ... <lit> 0     (m cube lines)

Literals are 1-based; negative means negated.  A bare ``0`` line is the
always-true cube.  Variables are 0-based everywhere in the API; only the file
format and parse error messages use 1-based indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Set, Tuple

from . import _kernels
from .gf2 import BitVec, RandomSource

__all__ = [
    "Literal",
    "Cube",
    "DnfFormula",
    "Assignment",
    "DnfParseError",
    "BruteForceLimitError",
    "BRUTE_FORCE_LIMIT",
    "parse_dnf",
    "serialize_dnf",
    "cube_satisfies",
    "coverage",
    "satisfies",
    "exact_count",
    "gen_random",
]

Assignment = BitVec

BRUTE_FORCE_LIMIT = 26

_GEN_STREAM = 0x67656E


class DnfParseError(ValueError):
    """Malformed DNF text; ``line`` is the 1-based offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class BruteForceLimitError(ValueError):
    """Raised when exact_count is asked to enumerate beyond its limit."""


@dataclass(frozen=True, order=True)
class Literal:
    """A possibly negated variable; ``var`` is 0-based."""

    var: int
    positive: bool

    def __post_init__(self):
        if self.var < 0:
            raise ValueError("variable index must be nonnegative")


@dataclass(frozen=True)
class Cube:
    """Conjunction of literals over distinct variables, sorted by variable.

    ``mask`` has a bit per constrained variable, ``pattern`` the forced values
    (pattern bits are a subset of mask bits).
    """

    literals: Tuple[Literal, ...]

    def __post_init__(self):
        mask = 0
        pattern = 0
        last = -1
        for lit in self.literals:
            if lit.var <= last:
                raise ValueError("cube literals must be sorted with distinct variables")
            last = lit.var
            mask |= 1 << lit.var
            if lit.positive:
                pattern |= 1 << lit.var
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "pattern", pattern)

    @property
    def width(self) -> int:
        return len(self.literals)


@dataclass(frozen=True)
class DnfFormula:
    """Normalized DNF over variables 0..n-1.

    ``cubes`` is empty exactly when the formula is unsatisfiable (every input
    cube contained a complementary literal pair); that empty tuple is the
    canonical false marker and serializes as the single cube ``1 -1 0``.
    """

    n: int
    cubes: Tuple[Cube, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("variable count must be at least 1")
        for cube in self.cubes:
            if cube.literals and cube.literals[-1].var >= self.n:
                raise ValueError("literal variable index beyond the variable count")

    @property
    def m(self) -> int:
        return len(self.cubes)

    @property
    def is_false(self) -> bool:
        return not self.cubes

    @property
    def is_tautology(self) -> bool:
        return any(c.width == 0 for c in self.cubes)

    @property
    def width_min(self) -> int:
        if self.is_false:
            raise ValueError("false formula has no cubes")
        return min(c.width for c in self.cubes)

    @staticmethod
    def build(n: int, cube_literals: Iterable[Iterable[Literal]]) -> "DnfFormula":
        """Normalize raw cubes: merge duplicate literals, drop contradictions."""
        cubes: List[Cube] = []
        for lits in cube_literals:
            cube = _normalize_cube(lits)
            if cube is not None:
                cubes.append(cube)
        return DnfFormula(n, tuple(cubes))


def _normalize_cube(lits: Iterable[Literal]) -> Optional[Cube]:
    by_var = {}
    for lit in lits:
        prev = by_var.get(lit.var)
        if prev is None:
            by_var[lit.var] = lit.positive
        elif prev != lit.positive:
            return None
    return Cube(tuple(Literal(v, pos) for v, pos in sorted(by_var.items())))


def cube_satisfies(x: Assignment, cube: Cube) -> bool:
    """True when every literal of the cube holds under x."""
    return (int(x) & cube.mask) == cube.pattern


def coverage(phi: DnfFormula, x: Assignment) -> Set[int]:
    """Indices of the cubes x satisfies (0-based)."""
    if len(x) != phi.n:
        raise ValueError("assignment length must equal the variable count")
    xb = int(x)
    return {i for i, c in enumerate(phi.cubes) if (xb & c.mask) == c.pattern}


def satisfies(phi: DnfFormula, x: Assignment) -> bool:
    if len(x) != phi.n:
        raise ValueError("assignment length must equal the variable count")
    xb = int(x)
    return any((xb & c.mask) == c.pattern for c in phi.cubes)


def exact_count(phi: DnfFormula, limit: int = BRUTE_FORCE_LIMIT) -> int:
    """|R_phi| by enumeration of all 2^n assignments.

    Tautologies and the false formula short-circuit without enumeration;
    anything else requires n <= limit.
    """
    if phi.is_false:
        return 0
    if phi.is_tautology:
        return 1 << phi.n
    if phi.n > limit:
        raise BruteForceLimitError(
            f"brute-force counting limited to {limit} variables, got {phi.n}"
        )
    masks = [c.mask for c in phi.cubes]
    pats = [c.pattern for c in phi.cubes]
    return _kernels.exact_count_small(phi.n, masks, pats)


def parse_dnf(text: str) -> DnfFormula:
    """Parse and normalize DNF text; raises DnfParseError with a line number."""
    header: Optional[Tuple[int, int]] = None
    raw_cubes: List[List[Literal]] = []
    n = m = 0
    last_line = 1
    for lineno, line in enumerate(text.splitlines(), start=1):
        last_line = lineno
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if header is None:
            parts = stripped.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "dnf":
                raise DnfParseError(lineno, "expected header 'p dnf <n> <m>'")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DnfParseError(lineno, "header counts must be integers") from None
            if n < 1:
                raise DnfParseError(lineno, "variable count must be at least 1")
            if m < 1:
                raise DnfParseError(lineno, "cube count must be at least 1")
            header = (n, m)
            continue
        if len(raw_cubes) == m:
            raise DnfParseError(lineno, f"more than {m} cube lines")
        try:
            tokens = [int(tok) for tok in stripped.split()]
        except ValueError:
            raise DnfParseError(lineno, "cube lines must contain integers") from None
        if not tokens or tokens[-1] != 0:
            raise DnfParseError(lineno, "cube line must end with 0")
        lits: List[Literal] = []
        for tok in tokens[:-1]:
            if tok == 0:
                raise DnfParseError(lineno, "literal 0 before the end of the cube")
            var = abs(tok)
            if var > n:
                raise DnfParseError(lineno, f"literal {tok} outside 1..{n}")
            lits.append(Literal(var - 1, tok > 0))
        raw_cubes.append(lits)
    if header is None:
        raise DnfParseError(1, "missing header 'p dnf <n> <m>'")
    if len(raw_cubes) != m:
        raise DnfParseError(
            last_line, f"expected {m} cube lines, found {len(raw_cubes)}"
        )
    return DnfFormula.build(n, raw_cubes)


def serialize_dnf(phi: DnfFormula) -> str:
    """Canonical text form; LF line endings; parse(serialize(phi)) == phi."""
    lines: List[str] = []
    if phi.is_false:
        lines.append(f"p dnf {phi.n} 1")
        lines.append("1 -1 0")
    else:
        lines.append(f"p dnf {phi.n} {phi.m}")
        for cube in phi.cubes:
            toks = [
                str(lit.var + 1 if lit.positive else -(lit.var + 1))
                for lit in cube.literals
            ]
            toks.append("0")
            lines.append(" ".join(toks))
    return "\n".join(lines) + "\n"


def gen_random(
    n: int, m: int, width_min: int, width_max: int, seed: int
) -> DnfFormula:
    """Seeded random formula: m cubes with widths uniform in [width_min, width_max],
    variables drawn without replacement per cube, polarities uniform."""
    if n < 1 or m < 1:
        raise ValueError("need at least one variable and one cube")
    if not 1 <= width_min <= width_max <= n:
        raise ValueError("need 1 <= width_min <= width_max <= n")
    src = RandomSource(seed, _GEN_STREAM)
    pool = list(range(n))
    cubes: List[Cube] = []
    for _ in range(m):
        w = width_min + src.rand_below(width_max - width_min + 1)
        for t in range(w):
            j = t + src.rand_below(n - t)
            pool[t], pool[j] = pool[j], pool[t]
        chosen = sorted(pool[:w])
        lits = tuple(Literal(v, src.rand_below(2) == 1) for v in chosen)
        cubes.append(Cube(lits))
    return DnfFormula(n, tuple(cubes))
