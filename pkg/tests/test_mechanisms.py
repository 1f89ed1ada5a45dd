"""Payment rules: pivot payments, next-slot payments, type inference."""

import pytest

from price_display_auctions import (
    AgentType,
    AuctionInstance,
    HyperbolaQuality,
    InferenceError,
    MechanismKind,
    OnlyMinQuality,
    PriceThresholdQuality,
    SlotProfile,
    SmoothDecayQuality,
    infer_type,
    profile,
    run_direct_vcg,
    run_indirect_gsp,
    run_indirect_vcg,
    run_indirect_vcg_star,
    run_mechanism,
    smooth_instance,
    truthful_star_profile,
)


def t10_instance():
    agents = (
        (AgentType(1.0, 0.0), OnlyMinQuality(cap=2.5)),
        (AgentType(1.0, 0.0), HyperbolaQuality(1.0, 2.5, 0.1)),
    )
    grid = (1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5)
    return AuctionInstance(agents, SlotProfile((1.0, 1.0)), grid)


def test_direct_vcg_payment_numbers():
    inst = t10_instance()
    out = run_direct_vcg(inst)
    assert out.allocation.display_prices == (2.5, 2.5)
    assert out.declared_welfare == pytest.approx(2.75, abs=1e-9)
    # Removing the strong agent leaves the price-sensitive one at the
    # floor (welfare 1.0); removing the weak one changes nothing above
    # her 0.25 contribution.
    assert out.payments[0] == pytest.approx(0.75, abs=1e-9)
    assert out.payments[1] == pytest.approx(0.0, abs=1e-9)
    assert out.revenue == pytest.approx(0.75, abs=1e-9)


def test_direct_vcg_single_agent_pays_nothing():
    agents = ((AgentType(1.0, 0.0), OnlyMinQuality()),)
    inst = AuctionInstance(agents, SlotProfile((1.0,)), (1.0, 2.0))
    out = run_direct_vcg(inst)
    assert out.payments == (0.0,)
    assert out.declared_welfare == pytest.approx(2.0)


def test_indirect_vcg_pivot_payment():
    inst = t10_instance()
    out = run_indirect_vcg(inst, profile((2.5, 2.5), (2.5, 2.5)))
    # Both displayed at 2.5; dropping either leaves the other's value
    # unchanged, so the externalities are zero.
    assert out.allocation.p_min == 2.5
    assert out.payments == (pytest.approx(0.0), pytest.approx(0.0))


def test_indirect_vcg_charges_displaced_value():
    agents = (
        (AgentType(1.0, 0.0), PriceThresholdQuality(threshold=5.0)),
        (AgentType(1.0, 0.0), PriceThresholdQuality(threshold=5.0)),
    )
    inst = AuctionInstance(agents, SlotProfile((1.0,)), (1.0, 2.0))
    out = run_indirect_vcg(inst, profile((2.0, 1.5), (2.0, 0.9)))
    assert out.allocation.slot_agents == (0,)
    # Winner displaces the loser's 0.9.
    assert out.payments[0] == pytest.approx(0.9)


def test_gsp_degenerate_second_price():
    # One slot, price-insensitive qualities: plain second-price auction.
    agents = (
        (AgentType(1.0, 0.0), PriceThresholdQuality(threshold=5.0)),
        (AgentType(1.0, 0.0), PriceThresholdQuality(threshold=5.0)),
    )
    inst = AuctionInstance(agents, SlotProfile((1.0,)), (1.0, 2.0))
    out = run_indirect_gsp(inst, profile((2.0, 1.5), (2.0, 0.9)))
    assert out.allocation.slot_agents == (0,)
    assert out.payments[0] == pytest.approx(0.9)
    # With one slot and equal prices, GSP and VCG payments coincide.
    vcg = run_indirect_vcg(inst, profile((2.0, 1.5), (2.0, 0.9)))
    assert out.payments == vcg.payments


def test_gsp_next_slot_payments():
    agents = tuple(
        (AgentType(1.0, 0.0), PriceThresholdQuality(threshold=5.0))
        for _ in range(3))
    inst = AuctionInstance(agents, SlotProfile((1.0, 0.5)), (1.0, 2.0))
    out = run_indirect_gsp(inst, profile((2.0, 1.0), (2.0, 0.6), (2.0, 0.4)))
    assert out.allocation.slot_agents == (0, 1)
    # Slot 1 pays the next occupant's weighted value; slot 2 pays the
    # best unassigned one.
    assert out.payments[0] == pytest.approx(1.0 * 0.6)
    assert out.payments[1] == pytest.approx(0.5 * 0.4)


def test_gsp_min_price_filter_keeps_ir():
    # Unassigned low-price ad: with the filter it cannot set the last
    # slot's payment; without it, the payment exceeds the slot value.
    agents = (
        (AgentType(1.0, 0.0), OnlyMinQuality()),
        (AgentType(1.0, 0.0), OnlyMinQuality()),
        (AgentType(1.0, 0.0), PriceThresholdQuality(threshold=1.0)),
    )
    inst = AuctionInstance(agents, SlotProfile((1.0, 1.0)), (1.0, 2.0))
    prof = profile((2.0, 1.0), (2.0, 1.0), (1.0, 1.5))
    filtered = run_indirect_gsp(inst, prof)
    assert filtered.allocation.slot_agents == (0, 1)
    assert filtered.payments[1] == pytest.approx(0.0)
    mutated = run_indirect_gsp(inst, prof, enforce_min_price_filter=False)
    from price_display_auctions.model import declared_value
    v = declared_value(inst, mutated.allocation, 1, prof[1].gain)
    assert mutated.payments[1] > v + 1e-9  # individual rationality broken


def test_gsp_zero_gain_display():
    agents = (
        (AgentType(1.0, 0.0), OnlyMinQuality(cap=2.5)),
        (AgentType(1.0, 0.0), HyperbolaQuality(1.0, 2.5, 0.1)),
    )
    inst = AuctionInstance(agents, SlotProfile((1.0, 1.0)), (1.0, 2.5))
    prof = profile((2.5, 2.5), (2.5, 0.0))
    without = run_indirect_gsp(inst, prof)
    assert without.allocation.slot_agents == (0,)
    assert without.payments[0] == pytest.approx(0.0)
    with_fill = run_indirect_gsp(inst, prof, allow_zero_gain=True)
    assert with_fill.allocation.slot_agents == (0, 1)
    # The filler bids zero, so nobody pays anything...
    assert with_fill.payments == (pytest.approx(0.0), pytest.approx(0.0))
    # ...but the page still earns her true value.
    assert with_fill.true_welfare == pytest.approx(2.5 + 0.1 * 2.5)


def test_infer_type_linear_diagonal():
    # Diagonal q(p, p) = 1 - p; truthful bid of (alpha, c) = (0.7, 0.2).
    q = SmoothDecayQuality(price_slope=1.0, gap_slope=0.0, intercept=1.0)
    p_star = q.standalone_price(0.7, 0.2)
    assert p_star == pytest.approx(0.6)
    p = 0.5
    b = 0.7 * (p - 0.2)
    it = infer_type(q, (b, p, p_star))
    assert it.c_hat == pytest.approx(0.2, abs=1e-9)
    assert it.alpha_hat == pytest.approx(0.7, abs=1e-9)
    assert not it.alpha_clamped


def test_infer_type_clamps_inconsistent_bids():
    q = SmoothDecayQuality(price_slope=1.0, intercept=1.0)
    it = infer_type(q, (5.0, 0.5, 0.6))  # bid far above any valid gain
    assert it.alpha_hat == 1.0
    assert it.alpha_clamped


def test_infer_type_zero_derivative_errors():
    q = PriceThresholdQuality(threshold=2.0)
    with pytest.raises(InferenceError):
        infer_type(q, (0.5, 1.0, 1.0))


def test_star_truthful_matches_direct_vcg():
    inst = smooth_instance(7)
    direct = run_direct_vcg(inst)
    star = run_indirect_vcg_star(inst, truthful_star_profile(inst))
    assert star.allocation.slot_agents == direct.allocation.slot_agents
    for a, b in zip(star.payments, direct.payments):
        assert a == pytest.approx(b, abs=1e-9)


def test_star_requires_standalone_price():
    inst = smooth_instance(7)
    from price_display_auctions import AuctionError
    with pytest.raises(AuctionError):
        run_indirect_vcg_star(inst, profile(*(((1.0, 0.5),) * inst.n)))


def test_star_fallback_withholds_allocation():
    # The submitted prices waste so much welfare that the inferred
    # optimum without some agent beats the whole allocation: nothing is
    # shown and nobody pays.
    agents = (
        (AgentType(1.0, 0.0), SmoothDecayQuality(0.4, 0.0, 1.0)),
        (AgentType(1.0, 0.0), SmoothDecayQuality(0.4, 0.0, 1.0)),
    )
    inst = AuctionInstance(agents, SlotProfile((1.0,)), (0.5, 1.25, 2.0))
    p_star = agents[0][1].standalone_price(1.0, 0.0)
    # Truthful standalone prices, but a terrible submitted price and a
    # zero bid from the rival.
    prof = profile((2.0, 0.3, p_star), (2.0, 0.0, p_star))
    out = run_indirect_vcg_star(inst, prof)
    assert out.allocation.slot_agents == ()
    assert out.payments == (0.0, 0.0)
    assert any("fallback" in d for d in out.diagnostics)


def test_star_payments_clamped_to_declared_value():
    inst = smooth_instance(3)
    from price_display_auctions import random_profile
    for seed in range(20):
        prof = random_profile(inst, seed, with_standalone=True)
        try:
            out = run_indirect_vcg_star(inst, prof)
        except InferenceError:
            continue
        from price_display_auctions.model import declared_value
        for i in range(inst.n):
            v = declared_value(inst, out.allocation, i, prof[i].gain)
            assert -1e-12 <= out.payments[i] <= v + 1e-9


def test_run_mechanism_dispatch():
    inst = t10_instance()
    prof = profile((2.5, 2.5), (2.5, 2.5))
    direct = run_mechanism(inst, MechanismKind.DIRECT_VCG, None)
    assert direct.revenue == pytest.approx(0.75, abs=1e-9)
    ivcg = run_mechanism(inst, MechanismKind.INDIRECT_VCG, prof)
    assert ivcg.revenue == pytest.approx(0.0)
    gsp = run_mechanism(inst, MechanismKind.INDIRECT_GSP, prof)
    assert gsp.revenue == pytest.approx(0.25)
