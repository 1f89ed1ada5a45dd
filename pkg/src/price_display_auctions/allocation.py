"""Welfare-maximizing allocation: the two fast algorithms and the
brute-force oracle used to cross-check them.

The indirect search fixes submitted prices and only chooses the
assignment; the direct search additionally chooses a display price per
agent from the finite price grid.  Both resolve near-ties (within
WELFARE_TOL) with a deterministic rule: candidates are enumerated in
ascending (p_min, designated agent) order and the first best wins, and
agents sort by descending weighted value with the instance tie-break.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import GuardExceededError
from .model import (
    EMPTY_ALLOCATION,
    WELFARE_TOL,
    Allocation,
    AuctionInstance,
    StrategyProfile,
    declared_welfare,
)

BRUTE_FORCE_MAX_AGENTS = 6
BRUTE_FORCE_MAX_SLOTS = 4
BRUTE_FORCE_MAX_PRICES = 6


@dataclass(frozen=True)
class DirectAllocationResult:
    """Allocation, chosen prices, and the agent designated to show p_min."""

    allocation: Allocation
    declared_welfare: float
    designated: int | None
    gains: tuple[float, ...]  # per-agent declared gain at the chosen prices


def _ranked(instance, entries):
    """Sort (agent, price, weight) triples for slot filling: descending
    weight, instance tie-break on near-ties."""
    return sorted(entries, key=lambda e: (-e[2], instance.rank(e[0])))


def _weighted_sw(instance, entries):
    lams = instance.slots.prominences
    return sum(lam * w for lam, (_, _, w) in zip(lams, entries))


def _allocation_from(entries):
    return Allocation(tuple(a for a, _, _ in entries),
                      tuple(p for _, p, _ in entries))


def indirect_allocate(instance: AuctionInstance, profile: StrategyProfile,
                      *, exclude: frozenset = frozenset(),
                      include_zero_gain: bool = False) -> Allocation:
    """Assignment maximizing declared welfare at the submitted prices.

    Every submitted price is tried as the minimum displayed price; only
    agents with strictly positive weighted declared value are assigned.
    With ``include_zero_gain``, agents who declared a gain of exactly 0
    are appended to leftover slots when their price and quality allow it
    (they contribute nothing to welfare either way).
    """
    agents = [i for i in range(instance.n) if i not in exclude]
    m = instance.m
    candidates = sorted({profile[i].price for i in agents})

    best_entries: list = []
    best_sw = 0.0
    for cand in candidates:
        entries = []
        for i in agents:
            p = profile[i].price
            if p < cand:
                continue
            w = instance.quality(i).q(p, cand) * profile[i].gain
            if w > 0.0:
                entries.append((i, p, w))
        if not entries:
            continue
        chosen = _ranked(instance, entries)[:m]
        actual = min(p for _, p, _ in chosen)
        if actual != cand:
            # No chosen agent priced exactly at the candidate: re-evaluate
            # at the actual minimum (qualities can only rise).
            chosen = _ranked(instance, [
                (i, p, instance.quality(i).q(p, actual) * profile[i].gain)
                for i, p, _ in chosen])
        sw = _weighted_sw(instance, chosen)
        if sw > best_sw + WELFARE_TOL:
            best_sw = sw
            best_entries = chosen

    allocation = _allocation_from(best_entries) if best_entries else EMPTY_ALLOCATION

    if include_zero_gain:
        allocation = _fill_zero_gain(instance, profile, agents, allocation)
    return allocation


def _fill_zero_gain(instance, profile, agents, allocation):
    """Append zero-gain agents (b == 0, positive quality) to free slots."""
    m = instance.m
    taken = set(allocation.assigned)
    p_min = allocation.p_min

    if p_min is None:
        # Nothing displayed: pick the candidate minimum price that fits
        # the most zero-gain ads (ties to the lower price).
        best = None
        for cand in sorted({profile[i].price for i in agents}):
            fit = [i for i in agents
                   if profile[i].gain == 0.0 and profile[i].price >= cand
                   and instance.quality(i).q(profile[i].price, cand) > 0.0]
            if fit and (best is None or len(fit) > len(best[1])):
                best = (cand, fit)
        if best is None:
            return allocation
        p_min, _ = best

    extras = [i for i in agents
              if i not in taken and profile[i].gain == 0.0
              and profile[i].price >= p_min
              and instance.quality(i).q(profile[i].price, p_min) > 0.0]
    extras.sort(key=instance.rank)
    free = m - len(allocation.assigned)
    if not extras or free <= 0:
        return allocation
    agents_out = allocation.slot_agents + tuple(extras[:free])
    prices_out = allocation.display_prices + tuple(
        profile[i].price for i in extras[:free])
    return Allocation(agents_out, prices_out)


def direct_allocate(instance: AuctionInstance, reported,
                    *, exclude: frozenset = frozenset()) -> DirectAllocationResult:
    """Joint assignment-and-price optimum over the instance price grid.

    Tries every (candidate minimum price, designated agent) pair: the
    designated agent is fixed at the candidate price, every other agent
    gets her best allowed price (when it yields positive value), and
    slots are filled greedily.
    """
    agents = [i for i in range(instance.n) if i not in exclude]
    grid = instance.price_grid
    m = instance.m

    best_sw = 0.0
    best_entries: list = []
    best_designated = None
    for p_hat in grid:
        # Per-agent best price >= p_hat when the minimum displayed price
        # is p_hat (ties to the lowest qualifying price).
        for i in agents:
            w_i = instance.quality(i).q(p_hat, p_hat) * reported[i].gain(p_hat)
            if w_i <= 0.0:
                continue
            entries = [(i, p_hat, w_i)]
            for h in agents:
                if h == i:
                    continue
                best_h = None
                for p in grid:
                    if p < p_hat:
                        continue
                    w = instance.quality(h).q(p, p_hat) * reported[h].gain(p)
                    if w > 0.0 and (best_h is None or w > best_h[1] + WELFARE_TOL):
                        best_h = (p, w)
                if best_h is not None:
                    entries.append((h, best_h[0], best_h[1]))
            others = _ranked(instance, entries[1:])
            pool = _ranked(instance, entries)
            if (i, p_hat, w_i) in pool[:m]:
                chosen = pool[:m]
            else:
                chosen = _ranked(instance, others[:m - 1] + [entries[0]])
            sw = _weighted_sw(instance, chosen)
            if sw > best_sw + WELFARE_TOL:
                best_sw = sw
                best_entries = chosen
                best_designated = i

    allocation = _allocation_from(best_entries) if best_entries else EMPTY_ALLOCATION
    gains = [0.0] * instance.n
    for a in allocation.assigned:
        gains[a] = reported[a].gain(allocation.price_of(a))
    return DirectAllocationResult(allocation, best_sw, best_designated, tuple(gains))


def _check_guard(n, m, n_prices=1):
    if n > BRUTE_FORCE_MAX_AGENTS or m > BRUTE_FORCE_MAX_SLOTS \
            or n_prices > BRUTE_FORCE_MAX_PRICES:
        raise GuardExceededError(
            f"brute force refused: n={n}, m={m}, |P|={n_prices} exceeds "
            f"guard ({BRUTE_FORCE_MAX_AGENTS}, {BRUTE_FORCE_MAX_SLOTS}, "
            f"{BRUTE_FORCE_MAX_PRICES})")


def _assignments(agents, m):
    """All injective partial assignments as (agent, slot) tuples."""
    for k in range(min(len(agents), m) + 1):
        for subset in itertools.combinations(agents, k):
            for slots in itertools.permutations(range(1, m + 1), k):
                yield tuple(zip(subset, slots))


def _evaluate(instance, assignment, prices, gains):
    if not assignment:
        return 0.0
    p_min = min(prices[a] for a, _ in assignment)
    sw = 0.0
    for a, slot in assignment:
        lam = instance.slots.prominence(slot)
        sw += lam * instance.quality(a).q(prices[a], p_min) * gains[a]
    return sw


def brute_force_allocate(instance: AuctionInstance, arg, mode: str,
                         *, exclude: frozenset = frozenset()):
    """Exhaustive search oracle.

    mode="indirect": ``arg`` is a StrategyProfile; enumerates every
    injective assignment at the submitted prices.
    mode="direct": ``arg`` is a sequence of reported AgentType; also
    enumerates every display price vector over the grid.  Returns the
    same result types as the fast algorithms.
    """
    agents = [i for i in range(instance.n) if i not in exclude]
    m = instance.m

    if mode == "indirect":
        _check_guard(len(agents), m)
        prices = {i: arg[i].price for i in agents}
        gains = {i: arg[i].gain for i in agents}
        best_sw, best = 0.0, ()
        for assignment in _assignments(agents, m):
            sw = _evaluate(instance, assignment, prices, gains)
            if sw > best_sw + WELFARE_TOL:
                best_sw, best = sw, assignment
        return _canonical(instance, best, prices, gains)

    if mode == "direct":
        _check_guard(len(agents), m, len(instance.price_grid))
        best_sw, best, best_prices = 0.0, (), {}
        for assignment in _assignments(agents, m):
            members = [a for a, _ in assignment]
            for combo in itertools.product(instance.price_grid, repeat=len(members)):
                prices = dict(zip(members, combo))
                gains = {a: arg[a].gain(prices[a]) for a in members}
                sw = _evaluate(instance, assignment, prices, gains)
                if sw > best_sw + WELFARE_TOL:
                    best_sw, best, best_prices = sw, assignment, prices
        gains = {a: arg[a].gain(best_prices[a]) for a, _ in best}
        allocation = _canonical(instance, best, best_prices, gains)
        out_gains = [0.0] * instance.n
        for a in allocation.assigned:
            out_gains[a] = gains[a]
        return DirectAllocationResult(allocation, best_sw, None, tuple(out_gains))

    raise ValueError(f"unknown mode {mode!r}")


def _canonical(instance, assignment, prices, gains):
    """Re-pack an oracle assignment into canonical (prefix, sorted) form."""
    if not assignment:
        return EMPTY_ALLOCATION
    p_min = min(prices[a] for a, _ in assignment)
    entries = [(a, prices[a], instance.quality(a).q(prices[a], p_min) * gains[a])
               for a, _ in assignment]
    return _allocation_from(_ranked(instance, entries))


def recomputed_declared_welfare(instance, allocation, gains) -> float:
    """Declared welfare recomputed from scratch on a result allocation."""
    return declared_welfare(instance, allocation, gains)
