"""Core domain types and welfare arithmetic.

All types are immutable after construction and every operation is a pure
function of its inputs, so everything here is safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import AuctionError
from .quality import QualityModel

# Absolute tolerance used whenever two welfare values are compared while
# selecting an argmax; ties within this band fall through to the
# deterministic tie-break rule.
WELFARE_TOL = 1e-9


@dataclass(frozen=True)
class AgentType:
    """Private pair: conversion probability and unit supply cost."""

    alpha: float
    cost: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise AuctionError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.cost < 0.0:
            raise AuctionError(f"cost must be >= 0, got {self.cost}")

    def gain(self, price: float) -> float:
        """Expected gain per click at the given selling price."""
        return self.alpha * (price - self.cost)


@dataclass(frozen=True)
class SlotProfile:
    """Ordered slot prominences; unassigned ads see prominence 0."""

    prominences: tuple[float, ...]

    def __post_init__(self):
        lams = self.prominences
        if not lams:
            raise AuctionError("need at least one slot")
        for lam in lams:
            if not 0.0 <= lam <= 1.0:
                raise AuctionError(f"prominence {lam} outside [0, 1]")
        for a, b in zip(lams, lams[1:]):
            if b > a:
                raise AuctionError(f"prominences must be non-increasing ({a} < {b})")

    def __len__(self):
        return len(self.prominences)

    def prominence(self, slot: int | None) -> float:
        """Prominence of a 1-based slot index; 0 for None (unassigned)."""
        if slot is None:
            return 0.0
        return self.prominences[slot - 1]


@dataclass(frozen=True)
class AuctionInstance:
    """Agents, their quality models, slots, and the allowed price set."""

    agents: tuple[tuple[AgentType, QualityModel], ...]
    slots: SlotProfile
    price_grid: tuple[float, ...]
    # Priority permutation: agents earlier in this tuple win ties.  None
    # means ascending agent index.
    tie_break: tuple[int, ...] | None = None

    def __post_init__(self):
        if not self.agents:
            raise AuctionError("need at least one agent")
        grid = self.price_grid
        if not grid:
            raise AuctionError("price grid must be non-empty")
        if any(p < 0 for p in grid):
            raise AuctionError("price grid values must be >= 0")
        if list(grid) != sorted(set(grid)):
            raise AuctionError("price grid must be strictly ascending")
        if self.tie_break is not None and sorted(self.tie_break) != list(range(len(self.agents))):
            raise AuctionError("tie_break must be a permutation of agent indices")

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.slots)

    def atype(self, agent: int) -> AgentType:
        return self.agents[agent][0]

    def quality(self, agent: int) -> QualityModel:
        return self.agents[agent][1]

    def rank(self, agent: int) -> int:
        """Tie-break priority; lower rank wins."""
        if self.tie_break is None:
            return agent
        return self.tie_break.index(agent)


@dataclass(frozen=True)
class Strategy:
    """One agent's submitted bid for the indirect mechanisms."""

    price: float
    gain: float
    standalone_price: float | None = None

    def __post_init__(self):
        if self.price < 0:
            raise AuctionError(f"price must be >= 0, got {self.price}")
        if self.standalone_price is not None and self.standalone_price < 0:
            raise AuctionError("standalone price must be >= 0")


@dataclass(frozen=True)
class StrategyProfile:
    strategies: tuple[Strategy, ...]

    def __len__(self):
        return len(self.strategies)

    def __getitem__(self, agent: int) -> Strategy:
        return self.strategies[agent]

    @property
    def prices(self) -> tuple[float, ...]:
        return tuple(s.price for s in self.strategies)

    @property
    def gains(self) -> tuple[float, ...]:
        return tuple(s.gain for s in self.strategies)

    def replace(self, agent: int, strategy: Strategy) -> "StrategyProfile":
        strategies = list(self.strategies)
        strategies[agent] = strategy
        return StrategyProfile(tuple(strategies))


def profile(*pairs) -> StrategyProfile:
    """Build a StrategyProfile from (price, gain[, standalone]) tuples."""
    return StrategyProfile(tuple(Strategy(*p) for p in pairs))


@dataclass(frozen=True)
class Allocation:
    """Canonical allocation: ``slot_agents[j]`` occupies slot j+1.

    Display prices align with ``slot_agents``.  The canonical form keeps
    assigned agents in the slot prefix, in non-increasing weighted
    declared value order (the allocators enforce the ordering).
    """

    slot_agents: tuple[int, ...]
    display_prices: tuple[float, ...]

    def __post_init__(self):
        if len(self.slot_agents) != len(self.display_prices):
            raise AuctionError("one display price per assigned agent required")
        if len(set(self.slot_agents)) != len(self.slot_agents):
            raise AuctionError("at most one ad per slot / agent")

    @property
    def assigned(self) -> tuple[int, ...]:
        return self.slot_agents

    @property
    def p_min(self) -> float | None:
        if not self.display_prices:
            return None
        return min(self.display_prices)

    def slot_of(self, agent: int) -> int | None:
        """1-based slot of an agent, or None if not displayed."""
        try:
            return self.slot_agents.index(agent) + 1
        except ValueError:
            return None

    def price_of(self, agent: int) -> float | None:
        slot = self.slot_of(agent)
        if slot is None:
            return None
        return self.display_prices[slot - 1]


EMPTY_ALLOCATION = Allocation((), ())


def declared_value(instance: AuctionInstance, allocation: Allocation,
                   agent: int, gain: float) -> float:
    """lambda_{f(i)} * q_i(p_i, p_min) * b_i; 0 when not displayed."""
    slot = allocation.slot_of(agent)
    if slot is None:
        return 0.0
    p = allocation.display_prices[slot - 1]
    lam = instance.slots.prominence(slot)
    return lam * instance.quality(agent).q(p, allocation.p_min) * gain


def true_value(instance: AuctionInstance, allocation: Allocation,
               agent: int) -> float:
    """Declared value with the gain replaced by the agent's true gain."""
    slot = allocation.slot_of(agent)
    if slot is None:
        return 0.0
    p = allocation.display_prices[slot - 1]
    return declared_value(instance, allocation, agent, instance.atype(agent).gain(p))


def declared_welfare(instance: AuctionInstance, allocation: Allocation,
                     gains) -> float:
    """Sum of declared values; ``gains`` holds one gain per agent."""
    return sum(declared_value(instance, allocation, i, gains[i])
               for i in allocation.assigned)


def true_welfare(instance: AuctionInstance, allocation: Allocation) -> float:
    return sum(true_value(instance, allocation, i) for i in allocation.assigned)


def social_welfare(instance: AuctionInstance, allocation: Allocation,
                   profile: StrategyProfile, mode: str = "declared") -> float:
    """Welfare of an allocation under a profile, declared or true."""
    if mode == "declared":
        return declared_welfare(instance, allocation, profile.gains)
    if mode == "true":
        return true_welfare(instance, allocation)
    raise AuctionError(f"unknown welfare mode {mode!r}")


@dataclass(frozen=True)
class Outcome:
    """Allocation plus payments and the headline aggregates."""

    allocation: Allocation
    payments: tuple[float, ...]
    declared_welfare: float
    true_welfare: float
    diagnostics: tuple[str, ...] = field(default=())

    @property
    def revenue(self) -> float:
        return sum(self.payments)

    def utility(self, instance: AuctionInstance, agent: int) -> float:
        return true_value(instance, self.allocation, agent) - self.payments[agent]

    def utilities(self, instance: AuctionInstance) -> tuple[float, ...]:
        return tuple(self.utility(instance, i) for i in range(instance.n))


def truthful_gains(instance: AuctionInstance, allocation: Allocation) -> list[float]:
    """Per-agent true gain at the allocation's display prices (0 if unassigned)."""
    out = []
    for i in range(instance.n):
        p = allocation.price_of(i)
        out.append(0.0 if p is None else instance.atype(i).gain(p))
    return out
