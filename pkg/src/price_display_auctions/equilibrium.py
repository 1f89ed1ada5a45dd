"""Complete-information pure Nash analysis over finite strategy spaces.

The engine enumerates profiles exhaustively, so every ratio it reports
is relative to the supplied grids; callers who care about specific
off-grid deviations must put them on the grid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import GuardExceededError
from .mechanisms import MechanismKind, run_direct_vcg, run_mechanism
from .model import (
    AuctionInstance,
    Outcome,
    Strategy,
    StrategyProfile,
)

# An agent must gain strictly more than this to count as an improving
# deviation; keeps floating-point welfare ties from manufacturing
# spurious instability.
NASH_TOL = 1e-9

ENUMERATION_GUARD = 10_000_000


@dataclass(frozen=True)
class StrategySpace:
    """Per-agent finite menus of (price, gain) strategies."""

    options: tuple[tuple[Strategy, ...], ...]

    @property
    def size(self) -> int:
        out = 1
        for opts in self.options:
            out *= len(opts)
        return out

    @staticmethod
    def build(instance: AuctionInstance, *, prices=None,
              gain_levels=(0.0, 0.5, 1.0), overbidding: bool = False,
              extra_gains=()) -> "StrategySpace":
        """Menus from a price set and fractions of the truthful gain.

        For each allowed price p, the gain options are
        ``level * truthful_gain(p)`` for each level, plus ``extra_gains``
        verbatim (useful for overbidding menus).  Without overbidding,
        pairs violating b <= alpha * (p - c) are pruned.
        """
        if prices is None:
            prices = instance.price_grid
        menus = []
        for i in range(instance.n):
            t = instance.atype(i)
            opts = []
            for p in prices:
                cap = t.gain(p)
                gains = {round(level * cap, 15) for level in gain_levels}
                gains.update(extra_gains)
                for b in sorted(gains):
                    if not overbidding and b > cap + 1e-12:
                        continue
                    opts.append(Strategy(p, b))
            menus.append(tuple(dict.fromkeys(opts)))
        return StrategySpace(tuple(menus))


class _OutcomeCache:
    """Memoizes mechanism outcomes per profile within one analysis."""

    def __init__(self, instance, kind, gsp_allow_zero_gain):
        self.instance = instance
        self.kind = kind
        self.gsp_allow_zero_gain = gsp_allow_zero_gain
        self._store: dict = {}

    def outcome(self, profile: StrategyProfile) -> Outcome:
        key = tuple((s.price, s.gain) for s in profile.strategies)
        out = self._store.get(key)
        if out is None:
            out = run_mechanism(self.instance, self.kind, profile,
                                gsp_allow_zero_gain=self.gsp_allow_zero_gain)
            self._store[key] = out
        return out

    def utility(self, profile: StrategyProfile, agent: int) -> float:
        return self.outcome(profile).utility(self.instance, agent)


def best_response(instance: AuctionInstance, kind: MechanismKind,
                  space: StrategySpace, profile: StrategyProfile, agent: int,
                  *, gsp_allow_zero_gain: bool = False,
                  _cache: _OutcomeCache | None = None):
    """Utility-maximal strategy for one agent with the others fixed.

    Ties resolve toward the agent's current strategy, then to the
    lexicographically smallest (price, gain) pair.
    """
    cache = _cache or _OutcomeCache(instance, kind, gsp_allow_zero_gain)
    current = profile[agent]
    best_s, best_u = None, -math.inf
    candidates = sorted(space.options[agent], key=lambda s: (s.price, s.gain))
    if current in candidates:
        candidates.remove(current)
        candidates.insert(0, current)
    for s in candidates:
        u = cache.utility(profile.replace(agent, s), agent)
        if u > best_u + NASH_TOL:
            best_s, best_u = s, u
    return best_s, best_u


def is_nash(instance: AuctionInstance, kind: MechanismKind,
            space: StrategySpace, profile: StrategyProfile,
            *, gsp_allow_zero_gain: bool = False,
            _cache: _OutcomeCache | None = None):
    """True iff no agent has a strictly improving unilateral deviation.

    Returns (verdict, witness); the witness is (agent, strategy, gain in
    utility) for the first improving deviation found, else None.
    """
    cache = _cache or _OutcomeCache(instance, kind, gsp_allow_zero_gain)
    base = [cache.utility(profile, i) for i in range(instance.n)]
    for i in range(instance.n):
        for s in space.options[i]:
            if s == profile[i]:
                continue
            u = cache.utility(profile.replace(i, s), i)
            if u > base[i] + NASH_TOL:
                return False, (i, s, u - base[i])
    return True, None


def enumerate_pure_nash(instance: AuctionInstance, kind: MechanismKind,
                        space: StrategySpace,
                        *, gsp_allow_zero_gain: bool = False,
                        guard: int = ENUMERATION_GUARD) -> list[StrategyProfile]:
    """All pure Nash profiles of the finite game, in lexicographic order."""
    if space.size > guard:
        raise GuardExceededError(
            f"joint strategy space has {space.size} profiles (guard {guard})")
    cache = _OutcomeCache(instance, kind, gsp_allow_zero_gain)
    found = []
    for combo in itertools.product(*space.options):
        profile = StrategyProfile(combo)
        ok, _ = is_nash(instance, kind, space, profile, _cache=cache)
        if ok:
            found.append(profile)
    return found


@dataclass(frozen=True)
class EquilibriumReport:
    equilibria: tuple[StrategyProfile, ...]
    outcomes: tuple[Outcome, ...]
    benchmark_sw: float
    benchmark_rev: float  # direct-VCG revenue at truthful reports
    poa_sw: float
    pos_sw: float
    poa_rev: float
    pos_rev: float
    grid_resolution: float = math.nan
    notes: tuple[str, ...] = field(default=(
        "revenue benchmark is the direct VCG mechanism's truthful revenue",
    ))


def _ratio(benchmark: float, achieved: float) -> float:
    if benchmark <= NASH_TOL and achieved <= NASH_TOL:
        return 1.0
    if achieved <= NASH_TOL:
        return math.inf
    return benchmark / achieved


def efficiency_report(instance: AuctionInstance, kind: MechanismKind,
                      space: StrategySpace,
                      *, gsp_allow_zero_gain: bool = False) -> EquilibriumReport:
    """Enumerate equilibria and compare them to the truthful benchmarks.

    PoA divides the benchmark by the worst equilibrium objective, PoS by
    the best; no equilibria (or a zero equilibrium objective against a
    positive benchmark) reports +inf.
    """
    direct = run_direct_vcg(instance)
    benchmark_sw = direct.true_welfare
    benchmark_rev = direct.revenue
    equilibria = enumerate_pure_nash(instance, kind, space,
                                     gsp_allow_zero_gain=gsp_allow_zero_gain)
    outcomes = [run_mechanism(instance, kind, eq,
                              gsp_allow_zero_gain=gsp_allow_zero_gain)
                for eq in equilibria]
    if not equilibria:
        poa_sw = pos_sw = poa_rev = pos_rev = math.inf
    else:
        sws = [o.true_welfare for o in outcomes]
        revs = [o.revenue for o in outcomes]
        poa_sw = _ratio(benchmark_sw, min(sws))
        pos_sw = _ratio(benchmark_sw, max(sws))
        poa_rev = _ratio(benchmark_rev, min(revs))
        pos_rev = _ratio(benchmark_rev, max(revs))
    grid = instance.price_grid
    resolution = min((b - a for a, b in zip(grid, grid[1:])), default=0.0)
    return EquilibriumReport(tuple(equilibria), tuple(outcomes),
                             benchmark_sw, benchmark_rev,
                             poa_sw, pos_sw, poa_rev, pos_rev,
                             grid_resolution=resolution)


def truthful_direct_profile(instance: AuctionInstance) -> StrategyProfile:
    """The profile that mimics the direct mechanism under truthful play:
    displayed agents submit its chosen price with their true gain there,
    everyone else submits (0, 0)."""
    result = run_direct_vcg(instance)
    strategies = []
    for i in range(instance.n):
        p = result.allocation.price_of(i)
        if p is None:
            strategies.append(Strategy(0.0, 0.0))
        else:
            strategies.append(Strategy(p, instance.atype(i).gain(p)))
    return StrategyProfile(tuple(strategies))
