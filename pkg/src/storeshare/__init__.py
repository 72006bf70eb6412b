"""Cooperative sizing and cost sharing of electricity storage under two-period ToU pricing."""
from .allocation import (
    AllocationResult,
    BenefitReport,
    allocation_scenario1,
    allocation_scenario2_expected,
    allocation_scenario2_realized,
    average_realized_allocation,
    benefit_scenario1,
    benefit_scenario2,
)
from .coalition import Coalition
from .costs import (
    CapacityProfile,
    coalition_expected_value_v,
    coalition_realized_cost_u,
    expected_cost,
    realized_cost,
)
from .data import RunConfig, SynthSpec, generate_synthetic, ingest_intervals, load_config
from .empirical import (
    DailyPeakSeries,
    EmpiricalDistribution,
    JointSample,
    aggregate,
    cdf,
    conditional_mean_given_aggregate,
    correlation_matrix,
    quantile,
)
from .game import (
    check_core_membership,
    check_subadditivity,
    core_nonemptiness_certificate,
    materialize_game,
)
from .planner import CapacityPlan, optimal_capacity, optimal_expected_cost, plan_capacities
from .tariff import Tariff, arbitrage_constant, arbitrage_price

__version__ = "0.1.0"
