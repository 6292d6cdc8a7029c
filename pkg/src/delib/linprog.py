"""Exact rational linear programming for strict feasibility questions.

The systems solved here are tiny and must be decided exactly.  The solver
is a dense tableau simplex with Bland's rule (which cannot cycle), run in
scaled integer arithmetic: every tableau row is a vector of integer
numerators with one positive denominator, so a pivot is integer
cross-multiplication plus a gcd normalisation, and ratio tests compare
integer products.  Fractions appear only at the boundary.

Strict rows ``<a, x> > c`` are handled by a margin variable: replace them
by ``<a, x> >= c + delta``, clamp the free variables into the box
``-1 <= x_i <= 1`` (the callers' systems are homogeneous, so the box loses
no solutions), and maximise ``delta``; the strict system is feasible
exactly when the optimum is positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

_ZERO = Fraction(0)
_ONE = Fraction(1)

RELATIONS = ("<=", ">=", "=", ">")


class MalformedSystem(ValueError):
    """Raised for inconsistent row shapes or an unbounded margin objective."""


@dataclass(frozen=True)
class Row:
    coeffs: tuple[Fraction, ...]
    relation: str
    rhs: Fraction


@dataclass(frozen=True)
class LinearSystem:
    """Rows ``<a, x> REL b`` over ``variables`` free rational unknowns."""

    variables: int
    rows: tuple[Row, ...]

    def __post_init__(self):
        for row in self.rows:
            if len(row.coeffs) != self.variables:
                raise MalformedSystem("coefficient vector length must equal the variable count")
            if row.relation not in RELATIONS:
                raise MalformedSystem(f"unknown relation {row.relation!r}")


def make_system(variables: int, rows: Sequence[tuple[Sequence, str, object]]) -> LinearSystem:
    built = tuple(
        Row(tuple(Fraction(c) for c in coeffs), rel, Fraction(rhs)) for coeffs, rel, rhs in rows
    )
    return LinearSystem(variables, built)


# ---------------------------------------------------------------------------
# Integer tableau core.  nums[i] is a list of integer numerators, dens[i] the
# shared positive denominator of row i; the last row is the objective and the
# last column the right-hand side.


def _normalise(nums: list[int], den: int) -> tuple[list[int], int]:
    g = den
    for v in nums:
        g = gcd(g, v)
        if g == 1:
            return nums, den
    if g > 1:
        return [v // g for v in nums], den // g
    return nums, den


def _pivot(nums, dens, basis, row, col):
    prow = nums[row]
    q = prow[col]
    if q < 0:
        prow = [-v for v in prow]
        q = -q
    prow, pden = _normalise(prow, q)
    nums[row], dens[row] = prow, pden
    for i in range(len(nums)):
        if i == row:
            continue
        line = nums[i]
        f = line[col]
        if f == 0:
            continue
        merged = [a * pden - f * p for a, p in zip(line, prow)]
        nums[i], dens[i] = _normalise(merged, dens[i] * pden)
    if basis is not None:
        basis[row] = col


def _simplex_max(nums, dens, basis, ncols):
    """Maximise the objective held in the last row.  Bland's rule."""
    obj = len(nums) - 1
    while True:
        objrow = nums[obj]
        col = next((j for j in range(ncols) if objrow[j] < 0), None)
        if col is None:
            return
        best_row = None
        best_num = best_den = 0  # ratio = best_num / best_den, best_den > 0
        for r in range(obj):
            a = nums[r][col]
            if a > 0:
                num, den = nums[r][-1], a
                if (
                    best_row is None
                    or num * best_den < best_num * den
                    or (num * best_den == best_num * den and basis[r] < basis[best_row])
                ):
                    best_row, best_num, best_den = r, num, den
        if best_row is None:
            raise MalformedSystem("objective unbounded; the system is missing box constraints")
        _pivot(nums, dens, basis, best_row, col)


def _scaled_row(coeffs: Sequence[Fraction], rhs: Fraction) -> list[int]:
    den = rhs.denominator
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    return [int(c * den) for c in coeffs] + [int(rhs * den)]


def _solve_standard(A, b, c):
    """max c.z  s.t.  A z <= b, z >= 0.  Returns (value, z) or None if infeasible."""
    m, n = len(A), len(c)
    need_art = [i for i in range(m) if b[i] < 0]
    art_col = {i: n + m + k for k, i in enumerate(need_art)}
    ncols = n + m + len(need_art)

    nums: list[list[int]] = []
    dens: list[int] = []
    basis: list[int] = []
    for i in range(m):
        scaled = _scaled_row(A[i], b[i])
        row = scaled[:-1] + [0] * (m + len(need_art)) + [scaled[-1]]
        row[n + i] = 1  # slack
        if i in art_col:
            row = [-v for v in row]
            row[art_col[i]] = 1
            basis.append(art_col[i])
        else:
            basis.append(n + i)
        nums.append(row)
        dens.append(1)

    if need_art:
        # Phase 1: maximise minus the artificial total.  Start from +1 on the
        # artificial columns and zero the basic ones out by subtracting their
        # rows, keeping everything over one integer denominator.
        obj_num = [0] * (ncols + 1)
        for col in art_col.values():
            obj_num[col] = 1
        obj_den = 1
        for i in need_art:
            r = basis.index(art_col[i])
            prow, pden = nums[r], dens[r]
            obj_num = [a * pden - obj_den * p for a, p in zip(obj_num, prow)]
            obj_num, obj_den = _normalise(obj_num, obj_den * pden)
        nums.append(obj_num)
        dens.append(obj_den)
        _simplex_max(nums, dens, basis, ncols)
        if nums[-1][-1] != 0:
            return None
        nums.pop()
        dens.pop()
        # Drive leftover artificials out of the basis (degenerate rows).
        for r in range(m):
            if basis[r] >= n + m:
                col = next((j for j in range(n + m) if nums[r][j] != 0), None)
                if col is not None:
                    _pivot(nums, dens, basis, r, col)
        for r in range(m):
            nums[r] = nums[r][: n + m] + [nums[r][-1]]
        ncols = n + m

    # Phase 2: maximise the integer-scaled objective cden * c.
    cden = 1
    for f in c:
        cden = cden * f.denominator // gcd(cden, f.denominator)
    cnum = [int(f * cden) for f in c]
    obj_num = [-v for v in cnum] + [0] * (ncols - n) + [0]
    obj_den = 1
    for r in range(m):
        if basis[r] < n and cnum[basis[r]] != 0:
            prow, pden = nums[r], dens[r]
            f = cnum[basis[r]]
            obj_num = [a * pden + obj_den * f * p for a, p in zip(obj_num, prow)]
            obj_num, obj_den = _normalise(obj_num, obj_den * pden)
    nums.append(obj_num)
    dens.append(obj_den)
    _simplex_max(nums, dens, basis, ncols)

    z = [_ZERO] * n
    for r in range(m):
        if basis[r] < n:
            z[basis[r]] = Fraction(nums[r][-1], dens[r])
    value = Fraction(nums[-1][-1], dens[-1] * cden)
    return value, z


def solve_lp_feasible_strict(system: LinearSystem) -> tuple[Fraction, ...] | None:
    """A rational point satisfying the system with every strict row slack.

    Returns ``None`` when no such point exists.  Intended for homogeneous
    systems (all right-hand sides zero); inhomogeneous callers must ensure a
    witness inside the unit box exists, since the box is always imposed.
    """
    d = system.variables
    # Unknowns: x = p - q with p, q >= 0, plus the margin delta >= 0.
    n = 2 * d + 1
    delta = 2 * d
    A, b = [], []

    def emit(coeffs, rhs, delta_coeff=_ZERO):
        row = [_ZERO] * n
        for j, cj in enumerate(coeffs):
            row[j] = cj
            row[d + j] = -cj
        row[delta] = delta_coeff
        A.append(row)
        b.append(rhs)

    for r in system.rows:
        if r.relation == "<=":
            emit(r.coeffs, r.rhs)
        elif r.relation == ">=":
            emit([-c for c in r.coeffs], -r.rhs)
        elif r.relation == "=":
            emit(r.coeffs, r.rhs)
            emit([-c for c in r.coeffs], -r.rhs)
        else:  # strict: <a, x> >= rhs + delta
            emit([-c for c in r.coeffs], -r.rhs, delta_coeff=_ONE)
    # Cap the margin so the objective stays bounded even without strict rows;
    # any positive optimum still certifies strict feasibility.
    A.append([_ZERO] * (n - 1) + [_ONE])
    b.append(_ONE)
    unit = [_ZERO] * d
    for j in range(d):
        unit[j] = _ONE
        emit(unit, _ONE)
        emit([-c for c in unit], _ONE)
        unit[j] = _ZERO

    c = [_ZERO] * n
    c[delta] = _ONE
    res = _solve_standard(A, b, c)
    if res is None:
        return None
    value, z = res
    if value <= 0:
        return None
    return tuple(z[j] - z[d + j] for j in range(d))


def strict_positive_direction(normals: Sequence[Sequence[Fraction]]) -> tuple[Fraction, ...] | None:
    """A direction x with <v, x> > 0 for every v, or None."""
    if not normals:
        return None
    d = len(normals[0])
    rows = [(tuple(v), ">", _ZERO) for v in normals]
    return solve_lp_feasible_strict(make_system(d, rows))
