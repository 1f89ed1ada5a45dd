"""Equilibrium engine: spaces, best responses, enumeration, ratios."""

import math

import pytest

from price_display_auctions import (
    AgentType,
    AuctionInstance,
    GuardExceededError,
    MechanismKind,
    OnlyMinQuality,
    PriceThresholdQuality,
    SlotProfile,
    Strategy,
    StrategyProfile,
    StrategySpace,
    best_response,
    efficiency_report,
    enumerate_pure_nash,
    is_nash,
    profile,
    random_instance,
    run_mechanism,
    truthful_direct_profile,
)

VCG = MechanismKind.INDIRECT_VCG


def second_price_instance():
    agents = (
        (AgentType(1.0, 0.0), PriceThresholdQuality(threshold=5.0)),
        (AgentType(1.0, 0.5), PriceThresholdQuality(threshold=5.0)),
    )
    return AuctionInstance(agents, SlotProfile((1.0,)), (1.0, 2.0))


def test_space_build_levels_and_pruning():
    inst = second_price_instance()
    space = StrategySpace.build(inst, gain_levels=(0.0, 0.5, 1.0))
    # Agent 0 at price 2 has truthful gain 2: menu {0, 1, 2}.
    opts = {(s.price, s.gain) for s in space.options[0]}
    assert (2.0, 2.0) in opts and (2.0, 1.0) in opts and (2.0, 0.0) in opts
    # No overbidding: nothing above the truthful cap.
    for i in range(inst.n):
        for s in space.options[i]:
            assert s.gain <= inst.atype(i).gain(s.price) + 1e-9
    bigger = StrategySpace.build(inst, overbidding=True, extra_gains=(9.0,))
    assert any(s.gain == 9.0 for s in bigger.options[1])
    assert space.size == len(space.options[0]) * len(space.options[1])


def test_best_response_prefers_current_on_ties():
    inst = second_price_instance()
    space = StrategySpace.build(inst, gain_levels=(0.0, 1.0))
    # Agent 1 bids 0 and loses either way: everything ties at utility 0,
    # so the current strategy must be kept.
    prof = profile((2.0, 2.0), (2.0, 0.0))
    s, u = best_response(inst, VCG, space, prof, 1)
    assert s == prof[1]
    assert u == pytest.approx(0.0)


def test_best_response_finds_strict_improvement():
    inst = second_price_instance()
    space = StrategySpace.build(inst, gain_levels=(0.0, 1.0))
    prof = profile((2.0, 0.0), (2.0, 1.5))
    s, u = best_response(inst, VCG, space, prof, 0)
    # Winning at the truthful bid costs the rival's 1.5 but earns 2.
    assert (s.price, s.gain) == (2.0, 2.0)
    assert u == pytest.approx(0.5)


def test_is_nash_witness():
    inst = second_price_instance()
    space = StrategySpace.build(inst, gain_levels=(0.0, 1.0))
    ok, witness = is_nash(inst, VCG, space, profile((2.0, 2.0), (2.0, 0.0)))
    assert ok and witness is None
    ok, witness = is_nash(inst, VCG, space, profile((2.0, 0.0), (2.0, 1.5)))
    assert not ok
    agent, strategy, gain = witness
    assert agent == 0
    assert gain == pytest.approx(0.5)


def test_enumeration_against_hand_check():
    """Cross-check enumerate_pure_nash against a from-scratch double loop."""
    inst = second_price_instance()
    space = StrategySpace.build(inst, prices=(2.0,), gain_levels=(0.0, 1.0))
    found = enumerate_pure_nash(inst, VCG, space)

    def utility(prof, i):
        out = run_mechanism(inst, VCG, prof)
        return out.utility(inst, i)

    expected = []
    import itertools
    for combo in itertools.product(*space.options):
        prof = StrategyProfile(combo)
        nash = True
        for i in range(inst.n):
            base = utility(prof, i)
            for s in space.options[i]:
                if utility(prof.replace(i, s), i) > base + 1e-9:
                    nash = False
        if nash:
            expected.append(tuple((s.price, s.gain) for s in combo))
    got = [tuple((s.price, s.gain) for s in prof.strategies) for prof in found]
    assert got == expected
    assert len(got) >= 1


def test_enumeration_guard():
    inst = random_instance(1, max_agents=4)
    space = StrategySpace.build(inst)
    with pytest.raises(GuardExceededError):
        enumerate_pure_nash(inst, VCG, space, guard=1)


def test_efficiency_report_ratios():
    agents = tuple((AgentType(1.0, 0.0), OnlyMinQuality(cap=1.0))
                   for _ in range(3))
    inst = AuctionInstance(agents, SlotProfile((1.0, 1.0)), (0.5, 0.75, 1.0))
    space = StrategySpace.build(inst, gain_levels=(0.0, 0.5, 1.0))
    report = efficiency_report(inst, VCG, space)
    assert report.benchmark_sw == pytest.approx(2.0)
    # The all-at-0.5 equilibrium earns 1.0; the best equilibria reach 2.0.
    assert report.poa_sw == pytest.approx(2.0, abs=1e-9)
    assert report.pos_sw == pytest.approx(1.0, abs=1e-9)
    assert report.grid_resolution == pytest.approx(0.25)
    assert any("direct VCG" in note for note in report.notes)


def test_report_infinite_revenue_ratio():
    # Direct revenue positive, every equilibrium revenue zero.
    agents = (
        (AgentType(1.0, 0.0), OnlyMinQuality(cap=2.5)),
        (AgentType(1.0, 0.0), PriceThresholdQuality(threshold=1.0)),
    )
    inst = AuctionInstance(agents, SlotProfile((1.0,)), (1.0, 1.75, 2.5))
    space = StrategySpace.build(inst, gain_levels=(0.0, 0.5, 1.0))
    report = efficiency_report(inst, MechanismKind.INDIRECT_GSP, space)
    assert report.benchmark_rev == pytest.approx(1.0)
    assert math.isinf(report.pos_rev)


def test_singleton_space_is_trivially_nash():
    inst = second_price_instance()
    space = StrategySpace(((Strategy(2.0, 2.0),), (Strategy(2.0, 1.5),)))
    report = efficiency_report(inst, VCG, space)
    assert len(report.equilibria) == 1
    assert report.outcomes[0].revenue == pytest.approx(1.5)


def test_truthful_direct_profile_structure():
    inst = random_instance(11)
    prof = truthful_direct_profile(inst)
    from price_display_auctions import run_direct_vcg
    direct = run_direct_vcg(inst)
    for i in range(inst.n):
        p = direct.allocation.price_of(i)
        if p is None:
            assert prof[i] == Strategy(0.0, 0.0)
        else:
            assert prof[i].price == p
            assert prof[i].gain == pytest.approx(inst.atype(i).gain(p))
