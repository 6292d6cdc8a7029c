"""Deliberation spaces: points, agents, distances, approval and scores.

Three space kinds are supported.  Hypercube points are packed bit masks
(coordinate ``i`` lives at bit ``d - 1 - i`` so that integer order equals
lexicographic order on coordinate tuples).  Euclidean points are tuples of
exact rationals and all comparisons use the squared norm, which is
order-equivalent to the norm itself.  Grid points are integer pairs under
the l1 distance.

The status quo is always the origin.  An agent approves a proposal when it
is strictly closer to the agent than the origin is; every comparison is
exact, there is no tolerance anywhere.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence


class Kind(enum.Enum):
    HYPERCUBE = "hypercube"
    EUCLIDEAN = "euclidean"
    GRID = "grid"


class SpaceError(ValueError):
    """Invalid space, point or agent data."""


class KindMismatch(SpaceError):
    """Points of different kinds or dimensions were combined."""


class StatusQuoProposal(SpaceError):
    """The status quo itself was offered as a proposal."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise SpaceError(f"refusing float coordinate {value!r}; use exact rationals")
    return Fraction(value)


@dataclass(frozen=True)
class Point:
    """A location in one of the three space kinds.

    ``data`` is an ``int`` bit mask for hypercube points and a tuple of
    coordinates otherwise (Fractions for Euclidean, ints for grid).
    """

    kind: Kind
    dim: int
    data: object

    def __post_init__(self):
        if self.dim <= 0:
            raise SpaceError("dimension must be positive")
        if self.kind is Kind.HYPERCUBE:
            if not isinstance(self.data, int) or not 0 <= self.data < (1 << self.dim):
                raise SpaceError("hypercube point must be a mask in [0, 2^d)")
        elif self.kind is Kind.EUCLIDEAN:
            object.__setattr__(self, "data", tuple(self.data))
            if len(self.data) != self.dim:
                raise SpaceError("coordinate count must equal the dimension")
        else:
            object.__setattr__(self, "data", tuple(self.data))
            if self.dim != 2 or len(self.data) != 2:
                raise SpaceError("grid points are integer pairs")
            if not all(isinstance(c, int) for c in self.data):
                raise SpaceError("grid coordinates must be integers")

    @property
    def mask(self) -> int:
        if self.kind is not Kind.HYPERCUBE:
            raise KindMismatch("mask is only defined for hypercube points")
        return self.data

    def coords(self) -> tuple:
        """Coordinates as a tuple, whatever the internal representation."""
        if self.kind is Kind.HYPERCUBE:
            return tuple((self.data >> (self.dim - 1 - i)) & 1 for i in range(self.dim))
        return tuple(self.data)

    def is_origin(self) -> bool:
        if self.kind is Kind.HYPERCUBE:
            return self.data == 0
        return not any(self.data)  # Fraction truthiness is a fast int test

    def sort_key(self):
        """Key realising lexicographic order on coordinates."""
        if self.kind is Kind.HYPERCUBE:
            return self.data
        return tuple(self.data)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.coords()) + ")"


def hypercube_point(coords: Sequence[int] | int, dim: int | None = None) -> Point:
    """Build a hypercube point from a 0/1 coordinate sequence or a mask."""
    if isinstance(coords, int):
        if dim is None:
            raise SpaceError("mask form requires an explicit dimension")
        return Point(Kind.HYPERCUBE, dim, coords)
    bits = list(coords)
    if any(b not in (0, 1) for b in bits):
        raise SpaceError("hypercube coordinates must be 0 or 1")
    d = len(bits)
    mask = 0
    for b in bits:
        mask = (mask << 1) | b
    return Point(Kind.HYPERCUBE, d, mask)


def hypercube_point_from_set(members: Iterable[int], dim: int) -> Point:
    """Hypercube point with the 1-coordinates listed by index (0-based)."""
    mask = 0
    for i in members:
        if not 0 <= i < dim:
            raise SpaceError(f"dimension index {i} out of range")
        mask |= 1 << (dim - 1 - i)
    return Point(Kind.HYPERCUBE, dim, mask)


def euclidean_point(coords: Sequence) -> Point:
    vec = tuple(_as_fraction(c) for c in coords)
    return Point(Kind.EUCLIDEAN, len(vec), vec)


def grid_point(x: int, y: int) -> Point:
    return Point(Kind.GRID, 2, (int(x), int(y)))


def origin(kind: Kind, dim: int) -> Point:
    if kind is Kind.HYPERCUBE:
        return Point(kind, dim, 0)
    if kind is Kind.EUCLIDEAN:
        return Point(kind, dim, (Fraction(0),) * dim)
    return Point(kind, 2, (0, 0))


def _check_compatible(a: Point, b: Point):
    if a.kind is not b.kind or a.dim != b.dim:
        raise KindMismatch(f"incompatible points: {a.kind.value}^{a.dim} vs {b.kind.value}^{b.dim}")


def distance(a: Point, b: Point) -> Fraction | int:
    """Hamming count, SQUARED Euclidean distance, or l1 grid distance.

    The squared form is used for Euclidean points throughout; it is
    order-equivalent to the norm for every comparison made here.
    """
    _check_compatible(a, b)
    if a.kind is Kind.HYPERCUBE:
        return (a.data ^ b.data).bit_count()
    if a.kind is Kind.EUCLIDEAN:
        return sum((x - y) ** 2 for x, y in zip(a.data, b.data))
    return abs(a.data[0] - b.data[0]) + abs(a.data[1] - b.data[1])


def dot(a: Point, b: Point) -> Fraction:
    if a.kind is not Kind.EUCLIDEAN or b.kind is not Kind.EUCLIDEAN:
        raise KindMismatch("inner products are defined for Euclidean points only")
    _check_compatible(a, b)
    return sum(x * y for x, y in zip(a.data, b.data))


@dataclass(frozen=True)
class Agent:
    """A position with a positive rational weight (1 for unweighted)."""

    position: Point
    weight: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "weight", _as_fraction(self.weight))
        if self.weight <= 0:
            raise SpaceError("agent weight must be positive")
        if self.position.is_origin():
            raise SpaceError("agents at the status quo approve nothing and are rejected")

    @cached_property
    def origin_distance(self) -> Fraction | int:
        p = self.position
        if p.kind is Kind.HYPERCUBE:
            return p.data.bit_count()
        if p.kind is Kind.EUCLIDEAN:
            return sum(c * c for c in p.data if c)
        return abs(p.data[0]) + abs(p.data[1])

    @cached_property
    def nonzero_coords(self) -> tuple[tuple[int, Fraction], ...]:
        """Sparse (index, value) view of a Euclidean position."""
        return tuple((i, c) for i, c in enumerate(self.position.data) if c != 0)


@dataclass(frozen=True)
class DeliberationSpace:
    """A space kind, a dimension, agents, and the implicit origin status quo."""

    kind: Kind
    dim: int
    agents: tuple[Agent, ...]
    grid_nonneg: bool = False

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        if not self.agents:
            raise SpaceError("a deliberation space needs at least one agent")
        for a in self.agents:
            if a.position.kind is not self.kind or a.position.dim != self.dim:
                raise KindMismatch("agent position does not match the space")
        if self.grid_nonneg:
            if self.kind is not Kind.GRID:
                raise SpaceError("grid_nonneg applies to grid spaces only")
            for a in self.agents:
                if min(a.position.data) < 0:
                    raise SpaceError("non-negative grid variant forbids negative coordinates")

    @property
    def n(self) -> int:
        return len(self.agents)

    @cached_property
    def total_weight(self) -> Fraction:
        return sum(a.weight for a in self.agents)

    @cached_property
    def unit_weights(self) -> bool:
        return all(a.weight == 1 for a in self.agents)

    def status_quo(self) -> Point:
        return origin(self.kind, self.dim)

    def validate_proposal(self, p: Point):
        """Reject proposals outside the space or equal to the status quo."""
        if p.kind is not self.kind or p.dim != self.dim:
            raise KindMismatch("proposal does not live in this space")
        if p.is_origin():
            raise StatusQuoProposal("the status quo is not a proposal")
        if self.grid_nonneg and min(p.data) < 0:
            raise SpaceError("proposal outside the non-negative quadrant")


def approves(agent: Agent, proposal: Point, space: DeliberationSpace) -> bool:
    """Exact strict-distance approval: dist(v, p) < dist(v, origin)."""
    space.validate_proposal(proposal)
    return _approves_unchecked(agent, proposal)


def _approves_unchecked(agent: Agent, proposal: Point) -> bool:
    p = agent.position
    if p.kind is Kind.HYPERCUBE:
        # |X| < 2 |V cap X| in set notation.
        return proposal.data.bit_count() < 2 * (p.data & proposal.data).bit_count()
    if p.kind is Kind.EUCLIDEAN:
        # ||p||^2 < 2 <v, p>, evaluated sparsely over the agent's support.
        sqnorm = sum(c * c for c in proposal.data if c)
        inner = sum(v * proposal.data[i] for i, v in agent.nonzero_coords)
        return sqnorm < 2 * inner
    return distance(p, proposal) < agent.origin_distance


class _ApprovalTest:
    """Approval of one fixed proposal, with per-proposal work precomputed."""

    def __init__(self, space: DeliberationSpace, proposal: Point):
        space.validate_proposal(proposal)
        self.proposal = proposal
        self._kind = space.kind
        if space.kind is Kind.EUCLIDEAN:
            self._sqnorm = sum(c * c for c in proposal.data if c)

    def __call__(self, agent: Agent) -> bool:
        p = self.proposal
        if self._kind is Kind.HYPERCUBE:
            return p.data.bit_count() < 2 * (agent.position.data & p.data).bit_count()
        if self._kind is Kind.EUCLIDEAN:
            data = p.data
            inner = sum(v * data[i] for i, v in agent.nonzero_coords)
            return self._sqnorm < 2 * inner
        return distance(agent.position, p) < agent.origin_distance


def approval_test(space: DeliberationSpace, proposal: Point) -> _ApprovalTest:
    return _ApprovalTest(space, proposal)


def approver_indices(space: DeliberationSpace, proposal: Point) -> tuple[int, ...]:
    test = approval_test(space, proposal)
    return tuple(i for i, a in enumerate(space.agents) if test(a))


def score(space: DeliberationSpace, proposal: Point) -> Fraction:
    """Total weight of the agents approving the proposal."""
    test = approval_test(space, proposal)
    return sum((a.weight for a in space.agents if test(a)), Fraction(0))


def distinct_positions(space: DeliberationSpace) -> tuple[tuple[Point, Fraction], ...]:
    """Group agents by exact position, weights summed, in lexicographic order.

    Co-located agents approve identical proposal sets, so solvers work on
    these groups instead of raw agents.
    """
    acc: dict[Point, Fraction] = {}
    for a in space.agents:
        acc[a.position] = acc.get(a.position, Fraction(0)) + a.weight
    return tuple(sorted(acc.items(), key=lambda kv: kv[0].sort_key()))


def position_groups(space: DeliberationSpace) -> tuple[tuple[Point, Fraction, tuple[int, ...]], ...]:
    """Like :func:`distinct_positions` but with the member agent indices."""
    acc: dict[Point, list[int]] = {}
    for i, a in enumerate(space.agents):
        acc.setdefault(a.position, []).append(i)
    out = []
    for pos in sorted(acc, key=lambda p: p.sort_key()):
        idx = tuple(acc[pos])
        out.append((pos, sum((space.agents[i].weight for i in idx), Fraction(0)), idx))
    return tuple(out)
