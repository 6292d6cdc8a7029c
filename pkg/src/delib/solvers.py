"""Popular-proposal solvers, one per algorithmic route.

Every solver returns a :class:`SolverReport` whose score is recomputed from
the returned proposal, so cross-checking two solvers amounts to comparing
reports.  The routes are deliberately independent of each other: hypercube
brute force against the dimension-type ILP, and the subset LP against
hyperplane-arrangement cell enumeration, so each pair can act as oracle for
the other.

All problems solved here are NP-hard in general; the exponential routes are
protected by explicit guards and fail loudly instead of hanging.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .linprog import make_system, solve_lp_feasible_strict
from .space import (
    DeliberationSpace,
    Kind,
    Point,
    approval_test,
    approver_indices,
    distinct_positions,
    euclidean_point,
    grid_point,
    hypercube_point,
    position_groups,
    score,
)

_ZERO = Fraction(0)


class GuardExceeded(RuntimeError):
    """An exponential search would exceed its configured guard."""


@dataclass(frozen=True)
class SolverLimits:
    """Size guards; exceeding one raises :class:`GuardExceeded`."""

    hyp_brute_max_dim: int = 26
    ilp_max_groups: int = 10
    subset_max_groups: int = 22


DEFAULT_LIMITS = SolverLimits()


class Method(enum.Enum):
    HYP_BRUTE = "brute"
    HYP_TYPE_ILP = "ilp"
    EUC_PERFECT_LP = "perfect-lp"
    EUC_SUBSET_LP = "subset-lp"
    EUC_CELLS = "cells"
    GRID_FOUR = "grid"


@dataclass(frozen=True)
class SolverReport:
    best_proposal: Point
    best_score: Fraction
    supporters: tuple[int, ...]
    method: Method
    work: int


def _report(space: DeliberationSpace, proposal: Point, method: Method, work: int) -> SolverReport:
    supporters = approver_indices(space, proposal)
    total = sum((space.agents[i].weight for i in supporters), _ZERO)
    return SolverReport(proposal, total, supporters, method, work)


# ---------------------------------------------------------------------------
# Hypercube: exhaustive scan.


def solve_hyp_bruteforce(space: DeliberationSpace, limits: SolverLimits = DEFAULT_LIMITS) -> SolverReport:
    """Scan all 2^d - 1 proposals; ties go to the lexicographically smallest."""
    if space.kind is not Kind.HYPERCUBE:
        raise ValueError("hypercube solver called on a non-hypercube space")
    if space.dim > limits.hyp_brute_max_dim:
        raise GuardExceeded(
            f"brute force over 2^{space.dim} proposals exceeds the guard (d <= {limits.hyp_brute_max_dim})"
        )
    groups = [(pos.data, w) for pos, w in distinct_positions(space)]
    best_mask, best_weight = None, _ZERO
    for mask in range(1, 1 << space.dim):
        size = mask.bit_count()
        w = _ZERO
        for gmask, gw in groups:
            if size < 2 * (gmask & mask).bit_count():
                w += gw
        if w > best_weight or best_mask is None:
            best_mask, best_weight = mask, w
    proposal = hypercube_point(best_mask, space.dim)
    return _report(space, proposal, Method.HYP_BRUTE, (1 << space.dim) - 1)


def hyp_unanimous_proposal(
    space: DeliberationSpace, limits: SolverLimits = DEFAULT_LIMITS
) -> Point | None:
    """First proposal approved by every agent, by the same exhaustive scan."""
    if space.kind is not Kind.HYPERCUBE:
        raise ValueError("hypercube solver called on a non-hypercube space")
    if space.dim > limits.hyp_brute_max_dim:
        raise GuardExceeded(
            f"brute force over 2^{space.dim} proposals exceeds the guard (d <= {limits.hyp_brute_max_dim})"
        )
    masks = [pos.data for pos, _ in distinct_positions(space)]
    for mask in range(1, 1 << space.dim):
        size = mask.bit_count()
        if all(size < 2 * (g & mask).bit_count() for g in masks):
            return hypercube_point(mask, space.dim)
    return None


# ---------------------------------------------------------------------------
# Hypercube: dimension types and the membership ILP.


def dimension_types(space: DeliberationSpace) -> dict[int, int]:
    """Map each dimension signature (bit g = group g's coordinate) to its count.

    Dimensions sharing a signature are interchangeable, which is what makes
    the ILP formulation over per-type counters sound.
    """
    groups = position_groups(space)
    sigs: dict[int, int] = {}
    for j in range(space.dim):
        bit = 1 << (space.dim - 1 - j)
        sig = 0
        for g, (pos, _, _) in enumerate(groups):
            if pos.data & bit:
                sig |= 1 << g
        sigs[sig] = sigs.get(sig, 0) + 1
    return sigs


def _type_dimensions(space: DeliberationSpace) -> dict[int, list[int]]:
    groups = position_groups(space)
    out: dict[int, list[int]] = {}
    for j in range(space.dim):
        bit = 1 << (space.dim - 1 - j)
        sig = 0
        for g, (pos, _, _) in enumerate(groups):
            if pos.data & bit:
                sig |= 1 << g
        out.setdefault(sig, []).append(j)
    return out


def _ilp_feasible(types: list[tuple[int, int]], n_groups: int, target: set[int]) -> dict[int, int] | None:
    """Depth-first search with interval pruning over the per-type counters.

    Row per group g: sum over types with bit g clear minus sum with bit g set,
    required <= -1 for g in the target set and >= 0 otherwise.
    """
    rows = []
    for g in range(n_groups):
        coeffs = [1 if not (sig >> g) & 1 else -1 for sig, _ in types]
        limit = -1 if g in target else 0
        rows.append((coeffs, limit, g in target))
    # The status quo is not a proposal: at least one coordinate must be set.
    rows.append(([1] * len(types), 1, False))
    nvars = len(types)
    partial = [0] * len(rows)
    # Remaining extreme contributions for suffixes of the variable order.
    suffix_min = [[0] * len(rows) for _ in range(nvars + 1)]
    suffix_max = [[0] * len(rows) for _ in range(nvars + 1)]
    for v in range(nvars - 1, -1, -1):
        _, count = types[v]
        for r, (coeffs, _, _) in enumerate(rows):
            lo = coeffs[v] * count if coeffs[v] < 0 else 0
            hi = coeffs[v] * count if coeffs[v] > 0 else 0
            suffix_min[v][r] = suffix_min[v + 1][r] + lo
            suffix_max[v][r] = suffix_max[v + 1][r] + hi
    assignment = [0] * nvars

    def feasible_here(v: int) -> bool:
        for r, (_, limit, member) in enumerate(rows):
            lo = partial[r] + suffix_min[v][r]
            hi = partial[r] + suffix_max[v][r]
            if member:
                if lo > limit:
                    return False
            else:
                if hi < limit:
                    return False
        return True

    def dfs(v: int) -> bool:
        if not feasible_here(v):
            return False
        if v == nvars:
            return True
        sig, count = types[v]
        for value in range(count + 1):
            assignment[v] = value
            for r, (coeffs, _, _) in enumerate(rows):
                partial[r] += coeffs[v] * value
            if dfs(v + 1):
                return True
            for r, (coeffs, _, _) in enumerate(rows):
                partial[r] -= coeffs[v] * value
        assignment[v] = 0
        return False

    if dfs(0):
        return {sig: assignment[i] for i, (sig, _) in enumerate(types)}
    return None


def solve_hyp_type_ilp(
    space: DeliberationSpace,
    target: Sequence[int],
    limits: SolverLimits = DEFAULT_LIMITS,
) -> dict[int, int] | None:
    """Per-type counters of a proposal approved by exactly the target agents.

    ``target`` holds agent indices.  Returns ``None`` when infeasible, e.g.
    when the target separates co-located agents.  The guard counts distinct
    positions, since those drive the number of types.
    """
    if space.kind is not Kind.HYPERCUBE:
        raise ValueError("type ILP called on a non-hypercube space")
    groups = position_groups(space)
    if len(groups) > limits.ilp_max_groups:
        raise GuardExceeded(
            f"{len(groups)} distinct positions exceed the ILP guard ({limits.ilp_max_groups})"
        )
    target_set = set(target)
    group_target: set[int] = set()
    for g, (_, _, members) in enumerate(groups):
        inside = sum(1 for i in members if i in target_set)
        if inside not in (0, len(members)):
            return None  # co-located agents approve identically
        if inside:
            group_target.add(g)
    types = sorted(dimension_types(space).items())
    return _ilp_feasible(types, len(groups), group_target)


def proposal_from_type_counts(space: DeliberationSpace, counts: dict[int, int]) -> Point:
    """Materialise a proposal with the given number of ones per dimension type."""
    by_type = _type_dimensions(space)
    mask = 0
    for sig, dims in by_type.items():
        k = counts.get(sig, 0)
        for j in dims[len(dims) - k:]:
            mask |= 1 << (space.dim - 1 - j)
    return hypercube_point(mask, space.dim)


def _subsets_by_weight_desc(weights: Sequence[Fraction]) -> Iterator[tuple[Fraction, tuple[int, ...]]]:
    """All index subsets, lazily, by descending total weight.

    Subsets are keyed by their sorted tuple of removed indices; children
    remove one further index beyond the last removed one, so each subset is
    generated exactly once.
    """
    m = len(weights)
    total = sum(weights, _ZERO)
    heap: list[tuple[Fraction, tuple[int, ...]]] = [(-total, ())]
    while heap:
        negw, removed = heapq.heappop(heap)
        kept = tuple(i for i in range(m) if i not in removed)
        yield -negw, kept
        start = removed[-1] + 1 if removed else 0
        for j in range(start, m):
            heapq.heappush(heap, (negw + weights[j], removed + (j,)))


def best_strict_support(
    positions: Sequence[Point],
    weights: Sequence[Fraction],
    stop_below: Fraction | None = None,
) -> tuple[tuple[tuple[int, ...], Fraction, tuple[Fraction, ...]] | None, int]:
    """Heaviest position subset admitting a common strictly-approving direction.

    Scans subsets by descending weight and returns on the first feasible one,
    which is therefore the maximum.  Only one-sided conditions are imposed:
    extra approvers of the witness can only add weight, and the scan order
    makes the first hit exact anyway.  Returns ``((indices, weight,
    direction) or None, LP count)``; the subset is ``None`` when nothing
    heavier than ``stop_below`` is feasible.
    """
    lp_count = 0
    for weight, kept in _subsets_by_weight_desc(weights):
        if not kept:
            continue
        if stop_below is not None and weight <= stop_below:
            return None, lp_count
        rows = [(tuple(positions[i].data), ">", _ZERO) for i in kept]
        lp_count += 1
        x = solve_lp_feasible_strict(make_system(positions[0].dim, rows))
        if x is not None:
            return (kept, weight, x), lp_count
    return None, lp_count


def proposal_from_direction(positions: Sequence[Point], direction: Sequence[Fraction]) -> Point:
    """Scale a feasible direction into an actual approved proposal.

    Picks the positive rational epsilon with eps*||x||^2 < 2*min <v, x>, so
    every position with a strictly positive inner product approves eps*x.
    """
    sqnorm = sum(c * c for c in direction)
    inners = [sum(v * c for v, c in zip(p.data, direction)) for p in positions]
    m = min(i for i in inners if i > 0)
    eps = m / sqnorm
    return euclidean_point(tuple(eps * c for c in direction))


def solve_euc_perfect(space: DeliberationSpace) -> Point | None:
    """A proposal approved by every agent, or None when no such point exists."""
    if space.kind is not Kind.EUCLIDEAN:
        raise ValueError("Euclidean solver called on a non-Euclidean space")
    positions = [pos for pos, _ in distinct_positions(space)]
    rows = [(tuple(p.data), ">", _ZERO) for p in positions]
    x = solve_lp_feasible_strict(make_system(space.dim, rows))
    if x is None:
        return None
    proposal = proposal_from_direction(positions, x)
    assert all(approval_test(space, proposal)(a) for a in space.agents)
    return proposal


def solve_euc_subsets(space: DeliberationSpace, limits: SolverLimits = DEFAULT_LIMITS) -> SolverReport:
    """Popular proposal by scanning subsets of distinct positions with LPs."""
    if space.kind is not Kind.EUCLIDEAN:
        raise ValueError("Euclidean solver called on a non-Euclidean space")
    grouped = distinct_positions(space)
    if len(grouped) > limits.subset_max_groups:
        raise GuardExceeded(
            f"{len(grouped)} distinct positions exceed the subset guard ({limits.subset_max_groups})"
        )
    positions = [pos for pos, _ in grouped]
    weights = [w for _, w in grouped]
    found, lp_count = best_strict_support(positions, weights)
    kept, _, direction = found
    proposal = proposal_from_direction([positions[i] for i in kept], direction)
    return _report(space, proposal, Method.EUC_SUBSET_LP, lp_count)


def solve_euc_cells(space: DeliberationSpace) -> SolverReport:
    """Popular proposal via incremental sign patterns of the normal arrangement.

    Maintains the achievable patterns of (sign <v_1, x>, ..., sign <v_i, x>)
    with signs collapsed to {positive, non-positive}; each pattern carries a
    witness direction, so one of the two extensions per pattern is free and
    the other costs one strict-feasibility LP.  The supported set of a
    pattern is its strictly-positive coordinate set.
    """
    if space.kind is not Kind.EUCLIDEAN:
        raise ValueError("Euclidean solver called on a non-Euclidean space")
    grouped = distinct_positions(space)
    positions = [pos for pos, _ in grouped]
    weights = [w for _, w in grouped]
    d = space.dim
    lp_count = 0
    # Each entry: (plus flags tuple, witness direction tuple).
    patterns: list[tuple[tuple[bool, ...], tuple[Fraction, ...]]] = [((), (_ZERO,) * d)]
    for idx, pos in enumerate(positions):
        extended: list[tuple[tuple[bool, ...], tuple[Fraction, ...]]] = []
        v = tuple(pos.data)
        for flags, witness in patterns:
            val = sum(a * b for a, b in zip(v, witness))
            free_plus = val > 0
            extended.append((flags + (free_plus,), witness))
            rows = [
                (tuple(positions[j].data), ">" if f else "<=", _ZERO)
                for j, f in enumerate(flags)
            ]
            rows.append((v, "<=" if free_plus else ">", _ZERO))
            lp_count += 1
            x = solve_lp_feasible_strict(make_system(d, rows))
            if x is not None:
                extended.append((flags + (not free_plus,), x))
        patterns = extended
    best_flags, best_witness, best_weight = None, None, _ZERO
    for flags, witness in patterns:
        w = sum((weights[i] for i, f in enumerate(flags) if f), _ZERO)
        if best_flags is None or w > best_weight:
            best_flags, best_witness, best_weight = flags, witness, w
    supported = [positions[i] for i, f in enumerate(best_flags) if f]
    if not supported:
        raise AssertionError("no supportable pattern found; spaces are never empty")
    proposal = proposal_from_direction(supported, best_witness)
    return _report(space, proposal, Method.EUC_CELLS, lp_count)


# ---------------------------------------------------------------------------
# Grid.


def grid_targets(nonneg: bool) -> tuple[Point, ...]:
    """The unit proposals that dominate every grid proposal's support."""
    if nonneg:
        return (grid_point(1, 0), grid_point(0, 1))
    return (grid_point(1, 0), grid_point(0, 1), grid_point(-1, 0), grid_point(0, -1))


def solve_grid_four(space: DeliberationSpace) -> SolverReport:
    """Popular proposal among the axis unit targets (which is globally popular)."""
    if space.kind is not Kind.GRID:
        raise ValueError("grid solver called on a non-grid space")
    best, best_score = None, None
    targets = grid_targets(space.grid_nonneg)
    for t in targets:
        s = score(space, t)
        if best is None or s > best_score:
            best, best_score = t, s
    return _report(space, best, Method.GRID_FOUR, len(targets))


# ---------------------------------------------------------------------------
# Dispatch.

_METHODS = {
    "auto": None,
    "brute": Method.HYP_BRUTE,
    "ilp": Method.HYP_TYPE_ILP,
    "subset-lp": Method.EUC_SUBSET_LP,
    "cells": Method.EUC_CELLS,
    "grid": Method.GRID_FOUR,
}


def solve_hyp_popular_via_ilp(
    space: DeliberationSpace, limits: SolverLimits = DEFAULT_LIMITS
) -> SolverReport:
    """Popular proposal by scanning agent subsets with the membership ILP."""
    if space.kind is not Kind.HYPERCUBE:
        raise ValueError("hypercube solver called on a non-hypercube space")
    groups = position_groups(space)
    if len(groups) > limits.ilp_max_groups:
        raise GuardExceeded(
            f"{len(groups)} distinct positions exceed the ILP guard ({limits.ilp_max_groups})"
        )
    types = sorted(dimension_types(space).items())
    weights = [w for _, w, _ in groups]
    work = 0
    for weight, kept in _subsets_by_weight_desc(weights):
        if not kept:
            continue
        work += 1
        counts = _ilp_feasible(types, len(groups), set(kept))
        if counts is not None:
            return _report(space, proposal_from_type_counts(space, counts), Method.HYP_TYPE_ILP, work)
    raise AssertionError("some nonempty support is always feasible (self-approval)")


def solve_popular(
    space: DeliberationSpace, method: str = "auto", limits: SolverLimits = DEFAULT_LIMITS
) -> SolverReport:
    """Dispatch to a solver; ``auto`` picks by kind and instance size."""
    if method not in _METHODS:
        raise ValueError(f"unknown method {method!r}")
    chosen = _METHODS[method]
    if chosen is None:
        if space.kind is Kind.HYPERCUBE:
            chosen = Method.HYP_BRUTE if (1 << space.dim) <= (1 << 20) else Method.HYP_TYPE_ILP
        elif space.kind is Kind.EUCLIDEAN:
            chosen = Method.EUC_CELLS if space.dim <= 3 else Method.EUC_SUBSET_LP
        else:
            chosen = Method.GRID_FOUR
    if chosen is Method.HYP_BRUTE:
        return solve_hyp_bruteforce(space, limits)
    if chosen is Method.HYP_TYPE_ILP:
        return solve_hyp_popular_via_ilp(space, limits)
    if chosen is Method.EUC_SUBSET_LP:
        return solve_euc_subsets(space, limits)
    if chosen is Method.EUC_CELLS:
        return solve_euc_cells(space)
    return solve_grid_four(space)
