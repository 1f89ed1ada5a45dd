"""Ad auctions where the selling price is displayed with the ad.

The library models click probabilities that react to the displayed price
and to the lowest price on the page, computes welfare-maximizing
allocations, prices the externalities four different ways, and analyzes
the pure Nash equilibria of the induced complete-information games.
"""

from .allocation import (
    BRUTE_FORCE_MAX_AGENTS,
    BRUTE_FORCE_MAX_PRICES,
    BRUTE_FORCE_MAX_SLOTS,
    DirectAllocationResult,
    brute_force_allocate,
    direct_allocate,
    indirect_allocate,
)
from .equilibrium import (
    NASH_TOL,
    EquilibriumReport,
    StrategySpace,
    best_response,
    efficiency_report,
    enumerate_pure_nash,
    is_nash,
    truthful_direct_profile,
)
from .errors import (
    AuctionError,
    ConstraintViolationError,
    GuardExceededError,
    InferenceError,
    InstanceFormatError,
    QualityDomainError,
)
from .mechanisms import (
    InferredType,
    MechanismKind,
    infer_type,
    run_direct_vcg,
    run_indirect_gsp,
    run_indirect_vcg,
    run_indirect_vcg_star,
    run_mechanism,
    truthful_star_profile,
)
from .model import (
    EMPTY_ALLOCATION,
    WELFARE_TOL,
    AgentType,
    Allocation,
    AuctionInstance,
    Outcome,
    SlotProfile,
    Strategy,
    StrategyProfile,
    declared_value,
    declared_welfare,
    profile,
    social_welfare,
    true_value,
    true_welfare,
    truthful_gains,
)
from .quality import (
    AuditReport,
    AuditViolation,
    HyperbolaQuality,
    OnlyMinQuality,
    PriceThresholdQuality,
    QualityModel,
    SmoothDecayQuality,
    TabulatedQuality,
    audit_quality,
    diagonal_derivative,
    probe_grid,
)
from .sampling import random_instance, random_profile, smooth_instance
from .scenarios import SCENARIO_IDS, Scenario, VerdictReport, build, reproduce
from .serialization import (
    instance_from_dict,
    instance_to_dict,
    load_instance,
    save_instance,
)

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
