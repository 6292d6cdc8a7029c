"""Two-dimensional grid deliberation and its constructive convergence.

On the grid every supportable proposal can be pulled one step toward the
origin without losing a single supporter, so support concentrates on the
axis unit proposals; convergence then amounts to relabelling each
coalition's proposal to a unit target, merging same-target coalitions, and
one final compromise onto the best target.  The non-negative quadrant needs
2-way compromises only, the full grid at most 3-way.

Relabelling a coalition's proposal in place is not itself a transition; it
is recorded in the trace notes and excluded from the transition count.
"""

from __future__ import annotations

import enum
from fractions import Fraction

from .dynamics import (
    Coalition,
    CoalitionStructure,
    DynamicsError,
    Trace,
    TraceStep,
    Transition,
    apply_transition,
    build_transition,
    is_successful,
    potential,
    singleton_structure,
    validate_structure,
    validate_transition,
)
from .solvers import grid_targets
from .space import DeliberationSpace, Kind, Point, approval_test, grid_point, score

_ZERO = Fraction(0)


class GridVariant(enum.Enum):
    NONNEGATIVE = "nonneg"
    FULL = "full"


def variant_of(space: DeliberationSpace) -> GridVariant:
    if space.kind is not Kind.GRID:
        raise ValueError("not a grid space")
    return GridVariant.NONNEGATIVE if space.grid_nonneg else GridVariant.FULL


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


def pull_toward_origin(p: Point) -> Point:
    """(x, y) -> (x - sign x, y - sign y); keeps every supporter supporting.

    Only defined outside the 3x3 core, i.e. when |x| > 1 or |y| > 1.
    """
    if p.kind is not Kind.GRID:
        raise ValueError("not a grid point")
    x, y = p.data
    if abs(x) <= 1 and abs(y) <= 1:
        raise ValueError("point already in the 3x3 core; nothing to pull")
    return grid_point(x - _sign(x), y - _sign(y))


def canonical_support_targets(variant: GridVariant) -> tuple[Point, ...]:
    """The unit proposals whose supports dominate all proposals' supports."""
    return grid_targets(variant is GridVariant.NONNEGATIVE)


def _canonical_target(space: DeliberationSpace, coalition: Coalition) -> Point:
    """A unit target every member approves, found by pulling the proposal."""
    p = coalition.proposal
    while abs(p.data[0]) > 1 or abs(p.data[1]) > 1:
        p = pull_toward_origin(p)
    targets = canonical_support_targets(variant_of(space))
    if p in targets:
        return p
    # Diagonal core proposal: its supporters approve both adjacent targets.
    for t in targets:
        test = approval_test(space, t)
        if all(test(space.agents[i]) for i in coalition.members):
            return t
    raise DynamicsError("no unit target approved by the whole coalition; not a valid grid coalition")


def grid_popular_bruteforce(space: DeliberationSpace, expand: int = 1) -> tuple[Point, Fraction]:
    """Popular proposal over the agents' bounding window grown by ``expand``.

    A belt-and-braces oracle: the pull argument guarantees the optimum is
    already among the unit targets.
    """
    xs = [a.position.data[0] for a in space.agents]
    ys = [a.position.data[1] for a in space.agents]
    lo_x, hi_x = min(min(xs), 0) - expand, max(max(xs), 0) + expand
    lo_y, hi_y = min(min(ys), 0) - expand, max(max(ys), 0) + expand
    if space.grid_nonneg:
        lo_x, lo_y = max(lo_x, 0), max(lo_y, 0)
    best, best_score = None, None
    for x in range(lo_x, hi_x + 1):
        for y in range(lo_y, hi_y + 1):
            if (x, y) == (0, 0):
                continue
            s = score(space, grid_point(x, y))
            if best is None or s > best_score:
                best, best_score = grid_point(x, y), s
    return best, best_score


def grid_converge(
    space: DeliberationSpace, initial: CoalitionStructure | None = None
) -> Trace:
    """Reach a successful structure in at most n transitions.

    Relabel every coalition onto a unit target (zero-cost, recorded in the
    notes), merge same-target coalitions, then make one compromise onto the
    most approved target; on the non-negative quadrant every transition is a
    2-compromise, on the full grid the last one involves at most three
    coalitions.
    """
    if space.kind is not Kind.GRID:
        raise ValueError("grid convergence needs a grid space")
    structure = initial if initial is not None else singleton_structure(space)
    validate_structure(space, structure)
    k_needed = 2 if space.grid_nonneg else 3
    notes: list[str] = []
    integer_weights = all(a.weight.denominator == 1 for a in space.agents)

    relabeled = []
    for i, c in enumerate(structure.coalitions):
        target = _canonical_target(space, c)
        if target != c.proposal:
            notes.append(f"relabel coalition {i}: {c.proposal} -> {target}")
        relabeled.append(Coalition(c.members, target))
    structure = CoalitionStructure(tuple(relabeled))

    steps: list[TraceStep] = []

    def record(t: Transition, before: CoalitionStructure, after: CoalitionStructure):
        phi_b = potential(before, space) if integer_weights else None
        phi_a = potential(after, space) if integer_weights else None
        sizes = tuple(len(before.coalitions[j].members) for j in t.participants)
        steps.append(TraceStep(t, sizes, phi_b, phi_a))

    # Merge phase: coalitions sharing a target join up (plain 2-compromises).
    while True:
        by_target: dict[Point, list[int]] = {}
        for i, c in enumerate(structure.coalitions):
            by_target.setdefault(c.proposal, []).append(i)
        pair = next((ids for ids in by_target.values() if len(ids) >= 2), None)
        if pair is None:
            break
        i, j = pair[0], pair[1]
        t = build_transition(space, structure, (i, j), structure.coalitions[i].proposal)
        ok, reason = validate_transition(space, structure, t, k=2)
        if not ok:
            raise DynamicsError(f"merge rejected: {reason}")
        after = apply_transition(space, structure, t)
        record(t, structure, after)
        structure = after

    targets = canonical_support_targets(variant_of(space))
    target_scores = [(t, score(space, t)) for t in targets]
    popular_score = max(s for _, s in target_scores)

    if not is_successful(space, structure, popular_score):
        best = next(t for t, s in target_scores if s == popular_score)
        test = approval_test(space, best)
        participants = tuple(
            j
            for j, c in enumerate(structure.coalitions)
            if any(test(space.agents[i]) for i in c.members)
        )
        if not 2 <= len(participants) <= k_needed:
            raise DynamicsError(
                f"final compromise needs {len(participants)} participants; expected 2..{k_needed}"
            )
        t = build_transition(space, structure, participants, best)
        ok, reason = validate_transition(space, structure, t, k=k_needed)
        if not ok:
            raise DynamicsError(f"final compromise rejected: {reason}")
        after = apply_transition(space, structure, t)
        record(t, structure, after)
        structure = after

    if not is_successful(space, structure, popular_score):
        raise DynamicsError("grid convergence failed to reach a successful structure")
    if len(steps) > space.n:
        raise DynamicsError("grid convergence exceeded the n-transition bound")
    return Trace(tuple(steps), True, "grid-converge", 0, structure, tuple(notes))
