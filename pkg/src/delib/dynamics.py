"""Coalition structures, k-compromise transitions, schedulers and runs.

A transition dissolves up to ``k`` coalitions into a new one consisting of
exactly the participants' members who approve the chosen proposal, which
must be strictly heavier than every participating coalition; dissenters stay
behind under their old proposals.  Searching for a transition is hard in
general, so the search is budgeted and reports ``unknown`` rather than
claiming terminality it has not established.

Single-coalition "transitions" are vacuous (strict growth inside a subset of
one coalition is impossible) and are never searched.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from . import solvers
from .linprog import make_system, solve_lp_feasible_strict
from .solvers import DEFAULT_LIMITS, GuardExceeded, SolverLimits
from .space import (
    DeliberationSpace,
    Kind,
    Point,
    approval_test,
    hypercube_point,
    score,
)

_ZERO = Fraction(0)


class DynamicsError(ValueError):
    pass


@dataclass(frozen=True)
class Coalition:
    """A non-empty agent set together with a proposal they all approve."""

    members: frozenset[int]
    proposal: Point

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if not self.members:
            raise DynamicsError("coalitions are non-empty")


@dataclass(frozen=True)
class CoalitionStructure:
    coalitions: tuple[Coalition, ...]

    def __post_init__(self):
        object.__setattr__(self, "coalitions", tuple(self.coalitions))

    def __len__(self) -> int:
        return len(self.coalitions)

    def member_union(self) -> frozenset[int]:
        out: set[int] = set()
        for c in self.coalitions:
            out |= c.members
        return frozenset(out)


def validate_structure(space: DeliberationSpace, structure: CoalitionStructure):
    """Exact partition of all agents; every member approves its proposal."""
    seen: set[int] = set()
    for c in structure.coalitions:
        if seen & c.members:
            raise DynamicsError("coalitions overlap")
        seen |= c.members
        test = approval_test(space, c.proposal)
        for i in c.members:
            if not 0 <= i < space.n:
                raise DynamicsError(f"agent index {i} out of range")
            if not test(space.agents[i]):
                raise DynamicsError(f"agent {i} does not approve its coalition's proposal")
    if seen != set(range(space.n)):
        raise DynamicsError("coalition structure does not cover all agents")


def singleton_structure(space: DeliberationSpace) -> CoalitionStructure:
    """Everyone alone at their own position (which they always approve)."""
    return CoalitionStructure(
        tuple(Coalition(frozenset({i}), a.position) for i, a in enumerate(space.agents))
    )


def coalition_weight(space: DeliberationSpace, members) -> Fraction | int:
    """Total weight; plain int on unit-weight spaces (compares fine with Fractions)."""
    if space.unit_weights:
        return len(members) if hasattr(members, "__len__") else sum(1 for _ in members)
    return sum((space.agents[i].weight for i in members), _ZERO)


@dataclass(frozen=True)
class Transition:
    """One applied k-compromise: participants, proposal, joiners, leftovers."""

    participants: tuple[int, ...]
    new_proposal: Point
    new_members: frozenset[int]
    leftovers: tuple[tuple[int, frozenset[int]], ...]

    @property
    def ell(self) -> int:
        return len(self.participants)


def build_transition(
    space: DeliberationSpace,
    structure: CoalitionStructure,
    participants: Sequence[int],
    proposal: Point,
) -> Transition:
    """Assemble the transition induced by a proposal: joiners are exactly the
    approving members of the participating coalitions."""
    test = approval_test(space, proposal)
    new_members: set[int] = set()
    leftovers = []
    for j in participants:
        members = structure.coalitions[j].members
        joining = {i for i in members if test(space.agents[i])}
        new_members |= joining
        leftovers.append((j, frozenset(members - joining)))
    return Transition(tuple(participants), proposal, frozenset(new_members), tuple(leftovers))


def validate_transition(
    space: DeliberationSpace,
    structure: CoalitionStructure,
    t: Transition,
    k: int,
) -> tuple[bool, str | None]:
    """Exact check of every transition clause; names the first violation."""
    idx = t.participants
    if len(set(idx)) != len(idx) or any(not 0 <= j < len(structure) for j in idx):
        return False, "participants must be distinct coalition indices"
    if not 2 <= t.ell <= k:
        return False, f"participant count {t.ell} outside 2..{k}"
    try:
        test = approval_test(space, t.new_proposal)
    except Exception:
        return False, "new proposal is not a proposal of this space"
    expected: set[int] = set()
    for j in idx:
        expected |= {i for i in structure.coalitions[j].members if test(space.agents[i])}
    if t.new_members != expected:
        return False, "new coalition must consist of exactly the approving members"
    if not t.new_members:
        return False, "new coalition is empty"
    new_weight = coalition_weight(space, t.new_members)
    for j in idx:
        if new_weight <= coalition_weight(space, structure.coalitions[j].members):
            return False, f"no strict growth over participant {j}"
    expected_left = {j: structure.coalitions[j].members - t.new_members for j in idx}
    if dict(t.leftovers) != expected_left:
        return False, "leftovers do not match the dissenting members"
    return True, None


def apply_transition(
    space: DeliberationSpace,
    structure: CoalitionStructure,
    t: Transition,
    k: int | None = None,
) -> CoalitionStructure:
    """New structure: survivors keep their order, then the new coalition, then
    non-empty leftovers in participant order."""
    if k is not None:
        ok, reason = validate_transition(space, structure, t, k)
        if not ok:
            raise DynamicsError(f"invalid transition: {reason}")
    part = set(t.participants)
    out = [c for j, c in enumerate(structure.coalitions) if j not in part]
    out.append(Coalition(t.new_members, t.new_proposal))
    for j, rest in t.leftovers:
        if rest:
            out.append(Coalition(rest, structure.coalitions[j].proposal))
    return CoalitionStructure(tuple(out))


def potential(structure: CoalitionStructure, space: DeliberationSpace) -> int:
    """-(number of coalitions) + sum over coalitions of 2^size.

    Sizes are integer total weights; defined only when every weight is an
    integer, since the bound claims are about counts.
    """
    total = -len(structure)
    for c in structure.coalitions:
        w = coalition_weight(space, c.members)
        if w.denominator != 1:
            raise DynamicsError("the potential is defined for integer weights only")
        total += 1 << int(w)
    return total


# ---------------------------------------------------------------------------
# Searching for compromises.


class SearchStatus(enum.Enum):
    FOUND = "found"
    TERMINAL = "terminal"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SearchResult:
    status: SearchStatus
    transition: Transition | None = None
    work: int = 0


def _participant_subsets(m: int, k: int) -> Iterator[tuple[int, ...]]:
    for ell in range(2, min(k, m) + 1):
        yield from itertools.combinations(range(m), ell)


def _best_candidate_for(
    space: DeliberationSpace,
    structure: CoalitionStructure,
    subset: tuple[int, ...],
    limits: SolverLimits,
) -> tuple[Transition | None, int]:
    """Canonical candidate: the heaviest approvable member set within the
    union of the participants.  Valid iff it strictly outweighs every
    participant; when it does not, no transition exists for this subset."""
    union: list[int] = []
    for j in subset:
        union.extend(sorted(structure.coalitions[j].members))
    union.sort()
    max_part = max(coalition_weight(space, structure.coalitions[j].members) for j in subset)

    if space.kind is Kind.HYPERCUBE:
        if space.dim > limits.hyp_brute_max_dim:
            raise GuardExceeded(
                f"compromise search over 2^{space.dim} proposals exceeds the guard"
            )
        masks = [(space.agents[i].position.data, space.agents[i].weight) for i in union]
        best_mask, best_w = None, _ZERO
        for mask in range(1, 1 << space.dim):
            size = mask.bit_count()
            w = _ZERO
            for amask, aw in masks:
                if size < 2 * (amask & mask).bit_count():
                    w += aw
            if best_mask is None or w > best_w:
                best_mask, best_w = mask, w
        work = (1 << space.dim) - 1
        if best_w <= max_part:
            return None, work
        proposal = hypercube_point(best_mask, space.dim)
    elif space.kind is Kind.EUCLIDEAN:
        grouped: dict[Point, Fraction] = {}
        for i in union:
            a = space.agents[i]
            grouped[a.position] = grouped.get(a.position, _ZERO) + a.weight
        positions = sorted(grouped, key=lambda p: p.sort_key())
        if len(positions) > limits.subset_max_groups:
            raise GuardExceeded(
                f"{len(positions)} distinct positions exceed the subset guard"
            )
        weights = [grouped[p] for p in positions]
        found, lp_count = solvers.best_strict_support(positions, weights, stop_below=max_part)
        if found is None:
            return None, lp_count
        kept, _, direction = found
        proposal = solvers.proposal_from_direction([positions[i] for i in kept], direction)
        work = lp_count
    else:
        candidates = list(solvers.grid_targets(space.grid_nonneg))
        candidates += [structure.coalitions[j].proposal for j in subset]
        best, best_w = None, _ZERO
        for p in candidates:
            test = approval_test(space, p)
            w = sum((space.agents[i].weight for i in union if test(space.agents[i])), _ZERO)
            if best is None or w > best_w:
                best, best_w = p, w
        work = len(candidates)
        if best_w <= max_part:
            return None, work
        proposal = best

    t = build_transition(space, structure, subset, proposal)
    ok, reason = validate_transition(space, structure, t, k=len(subset))
    if not ok:
        raise AssertionError(f"canonical candidate failed validation: {reason}")
    return t, work


def find_k_compromise(
    space: DeliberationSpace,
    structure: CoalitionStructure,
    k: int,
    search_budget: int | None = None,
    limits: SolverLimits = DEFAULT_LIMITS,
) -> SearchResult:
    """First valid transition under the deterministic subset order.

    The per-subset candidate is complete: if any transition exists for a
    participant set, the heaviest-support candidate is one.  Exhausting the
    budget yields ``unknown``, never a silent ``terminal``.
    """
    work = 0
    for subset in _participant_subsets(len(structure), k):
        if search_budget is not None and work >= search_budget:
            return SearchResult(SearchStatus.UNKNOWN, None, work)
        t, spent = _best_candidate_for(space, structure, subset, limits)
        work += spent
        if t is not None:
            return SearchResult(SearchStatus.FOUND, t, work)
    return SearchResult(SearchStatus.TERMINAL, None, work)


def enumerate_compromises(
    space: DeliberationSpace,
    structure: CoalitionStructure,
    k: int,
    limits: SolverLimits = DEFAULT_LIMITS,
) -> list[Transition]:
    """The canonical candidate of every participant subset that admits one."""
    out = []
    for subset in _participant_subsets(len(structure), k):
        t, _ = _best_candidate_for(space, structure, subset, limits)
        if t is not None:
            out.append(t)
    return out


# ---------------------------------------------------------------------------
# Schedulers.  A scheduler maps (space, structure, k, rng) to the next
# transition, or None when it has nothing further to play.  ``complete``
# means None certifies k-terminality.


class Scheduler:
    name = "scheduler"
    complete = False

    def __call__(self, space, structure, k, rng) -> Transition | None:
        raise NotImplementedError


class RandomScheduler(Scheduler):
    """Uniform choice among the per-subset canonical candidates."""

    name = "random"
    complete = True

    def __init__(self, limits: SolverLimits = DEFAULT_LIMITS):
        self.limits = limits

    def __call__(self, space, structure, k, rng):
        options = enumerate_compromises(space, structure, k, self.limits)
        if not options:
            return None
        return options[rng.randrange(len(options))]


class AdversarialScheduler(Scheduler):
    """The slow pairing schedule on all-subsets-realizable families.

    Merge an equal-size pair into a coalition one larger, splitting the
    remainder in half; with no equal pair, do the same to the two smallest
    coalitions.  Requires a support oracle, i.e. a family where every agent
    subset has a proposal approved by exactly that subset.
    """

    name = "adversarial"
    complete = False

    def __init__(self, support_oracle: Callable[[frozenset[int]], Point | None]):
        self.oracle = support_oracle

    def _pick(self, structure) -> tuple[int, int] | None:
        # Oracle families are unit weight, so sizes are cardinalities.  The
        # equal pair is the first repeated size in a left-to-right scan.
        sizes = [len(c.members) for c in structure.coalitions]
        seen: dict[int, int] = {}
        for i, s in enumerate(sizes):
            if s in seen:
                return seen[s], i
            seen[s] = i
        if len(sizes) < 2:
            return None
        best = sorted(range(len(sizes)), key=lambda j: (sizes[j], j))[:2]
        return best[0], best[1]

    def __call__(self, space, structure, k, rng):
        if len(structure) < 2:
            return None
        pick = self._pick(structure)
        if pick is None:
            return None
        i, j = pick
        first = sorted(structure.coalitions[i].members)
        second = sorted(structure.coalitions[j].members)
        a, b = len(first), len(second)
        if a > b:
            i, j, first, second, a, b = j, i, second, first, b, a
        # New coalition of size b+1, leaving floor((a-1)/2) from the smaller
        # coalition and ceil((a-1)/2) from the larger one.
        take_first = a - (a - 1) // 2
        take_second = (b + 1) - take_first
        members = frozenset(first[:take_first]) | frozenset(second[:take_second])
        proposal = self.oracle(members)
        if proposal is None:
            return None
        t = Transition(
            (i, j),
            proposal,
            members,
            (
                (i, frozenset(first[take_first:])),
                (j, frozenset(second[take_second:])),
            ),
        )
        return t


class GreedyFastScheduler(Scheduler):
    """Fast convergence for Euclidean spaces.

    Plays the first applicable of: (i) merge two coalitions that share an
    approvable proposal; (ii) grow a maximum-weight coalition by one outside
    agent; (iii) with exactly two coalitions left, compromise directly on a
    popular proposal.  Reaches a successful structure within n^2 + 1 steps.
    """

    name = "greedy-fast"
    complete = False

    def __init__(self, limits: SolverLimits = DEFAULT_LIMITS):
        self.limits = limits

    def _perfect_direction(self, space, agent_indices):
        positions = sorted(
            {space.agents[i].position for i in agent_indices}, key=lambda p: p.sort_key()
        )
        rows = [(tuple(p.data), ">", _ZERO) for p in positions]
        x = solve_lp_feasible_strict(make_system(space.dim, rows))
        if x is None:
            return None
        return solvers.proposal_from_direction(positions, x)

    def __call__(self, space, structure, k, rng):
        if space.kind is not Kind.EUCLIDEAN:
            raise DynamicsError("the greedy-fast scheduler requires a Euclidean space")
        m = len(structure)
        # (i) merge
        for i in range(m):
            for j in range(i + 1, m):
                both = structure.coalitions[i].members | structure.coalitions[j].members
                p = self._perfect_direction(space, both)
                if p is not None:
                    return build_transition(space, structure, (i, j), p)
        # (ii) one agent joins a maximum-weight coalition
        weights = [coalition_weight(space, c.members) for c in structure.coalitions]
        top = max(range(m), key=lambda j: (weights[j], -j))
        owner = {i: j for j, c in enumerate(structure.coalitions) for i in c.members}
        for agent in range(space.n):
            j = owner[agent]
            if j == top:
                continue
            p = self._perfect_direction(
                space, sorted(structure.coalitions[top].members) + [agent]
            )
            if p is not None:
                return build_transition(space, structure, (top, j), p)
        # (iii) two coalitions: aim straight at a popular proposal
        if m == 2:
            report = solvers.solve_popular(space, "auto", self.limits)
            t = build_transition(space, structure, (0, 1), report.best_proposal)
            ok, _ = validate_transition(space, structure, t, k=2)
            if ok:
                return t
        return None


# ---------------------------------------------------------------------------
# Runs and traces.


@dataclass(frozen=True)
class TraceStep:
    transition: Transition
    participant_sizes: tuple[int, ...]
    phi_before: int | None
    phi_after: int | None


@dataclass(frozen=True)
class Trace:
    steps: tuple[TraceStep, ...]
    terminal: bool
    scheduler: str
    seed: int
    final: CoalitionStructure
    notes: tuple[str, ...] = ()
    total_steps: int = -1  # equals len(steps) unless step recording was off

    def __post_init__(self):
        if self.total_steps < 0:
            object.__setattr__(self, "total_steps", len(self.steps))


TRACE_CSV_HEADER = "step,ell,participant_sizes,new_size,phi_before,phi_after"


def trace_to_csv(trace: Trace) -> str:
    lines = [TRACE_CSV_HEADER]
    for i, step in enumerate(trace.steps):
        t = step.transition
        sizes = "+".join(str(s) for s in step.participant_sizes)
        phi_b = "" if step.phi_before is None else str(step.phi_before)
        phi_a = "" if step.phi_after is None else str(step.phi_after)
        lines.append(f"{i},{t.ell},{sizes},{len(t.new_members)},{phi_b},{phi_a}")
    return "\n".join(lines) + "\n"


def run_deliberation(
    space: DeliberationSpace,
    initial: CoalitionStructure,
    scheduler: Scheduler,
    k: int,
    seed: int = 0,
    max_steps: int | None = None,
    record_steps: bool = True,
) -> Trace:
    """Apply scheduler-chosen transitions until none remains.

    Every transition is re-validated before it is applied; a scheduler
    producing an invalid one is a bug and fails hard.  On unit weights the
    potential is recorded and, for k = 2, each step must raise it by at
    least 1, which also enforces the 2^n step bound.  Very long runs can
    skip step recording; the trace then reports the count only.
    """
    validate_structure(space, initial)
    rng = random.Random(seed)
    integer_weights = all(a.weight.denominator == 1 for a in space.agents)
    cap = max_steps
    if cap is None and integer_weights:
        cap = k ** space.n + 1
    structure = initial
    steps: list[TraceStep] = []
    count = 0
    phi_current = potential(structure, space) if integer_weights else None
    while True:
        t = scheduler(space, structure, k, rng)
        if t is None:
            break
        ok, reason = validate_transition(space, structure, t, k)
        if not ok:
            raise DynamicsError(f"scheduler produced an invalid transition: {reason}")
        sizes = tuple(len(structure.coalitions[j].members) for j in t.participants)
        phi_before = phi_current
        structure = apply_transition(space, structure, t)
        phi_current = potential(structure, space) if integer_weights else None
        if k == 2 and integer_weights:
            assert phi_current - phi_before >= 1, "a 2-compromise must raise the potential"
        count += 1
        if record_steps:
            steps.append(TraceStep(t, sizes, phi_before, phi_current))
        if cap is not None and count > cap:
            raise DynamicsError("run exceeded the k^n transition bound; this is a bug")
    if k == 2 and integer_weights:
        assert count <= 2 ** space.n, "2-deliberations halt within 2^n transitions"
    terminal = scheduler.complete or len(structure) == 1
    return Trace(tuple(steps), terminal, scheduler.name, seed, structure, (), count)


def is_successful(
    space: DeliberationSpace, structure: CoalitionStructure, popular_score: Fraction
) -> bool:
    """Some coalition holds a proposal of popular score together with its
    entire approver set."""
    for c in structure.coalitions:
        if score(space, c.proposal) == popular_score:
            test = approval_test(space, c.proposal)
            approvers = {i for i, a in enumerate(space.agents) if test(a)}
            if approvers == set(c.members):
                return True
    return False
