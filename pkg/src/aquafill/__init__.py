"""Online fractional allocation: water-filling, majorization and worst cases."""

from .core import (
    HarmonicMatrix,
    LoadVector,
    Majorization,
    Rational,
    apply_harmonic,
    compare_majorization,
    equivalent,
    harmonic_number,
    karamata_majorizes,
    karamata_value,
    majorized_by,
    parse_rational,
    to_rational,
)
from .errors import *  # noqa: F401,F403
from .hindsight import (
    HindsightSolution,
    RankFunction,
    opt_hindsight,
    rank,
    sample_feasible,
    solve_hindsight,
)
from .objectives import ConcaveDecomposition, ObjectiveSpec, concave_decompose, evaluate, objective
from .policies import (
    ExpectationMode,
    GreedyLowestIndexPolicy,
    Policy,
    ProportionalPolicy,
    RandomSplitPolicy,
    ThresholdGuardPolicy,
    WaterFillingPolicy,
    expected_loads,
    make_policy,
    run_policy,
)
from .regret import (
    RegretReport,
    SearchConfig,
    alpha_regret,
    closed_form_cr,
    fm_sequence,
    numeric_competitive_ratio,
    numeric_minimax_regret,
)
from .sequences import (
    Arrival,
    InstanceParams,
    RequestSequence,
    check_feasible,
    induced_nested,
    is_nested,
    load_sequence,
    parse_sequence,
    random_instance,
    random_nested_instance,
    validate,
)
from .transforms import (
    GameTranscript,
    NestifyAudit,
    adaptive_game,
    nestify,
    policy_deviation,
    worstcase_upper_triangular,
)
from .waterfill import AllocationTrace, StepResult, run_waterfill, water_fill_step

threshold_guard_policy = ThresholdGuardPolicy

__version__ = "0.1.0"
