"""Entropy and pressure of Birkhoff level sets on symbolic systems."""
from .errors import (
    Infeasible,
    InvalidInput,
    LevelSetError,
    NoConvergence,
    NumericalError,
)
from .gluer import GluingSchedule, estimate_limit_set, glue_orbit, plan_schedule, verify_oscillation
from .measures import (
    EmpiricalMeasure,
    MarkovMeasure,
    MarkovMixtureMeasure,
    bernoulli,
    convex_combine,
    empirical_measure,
    integrate,
    markov_entropy,
    periodic_orbit,
    weakstar_distance,
)
from .observables import (
    Observable,
    birkhoff_average,
    birkhoff_stats,
    combine,
    constant,
    from_values,
    indicator,
    symbol_indicator,
)
from .oracle import count_level_words, count_separated, count_words, log_weighted_count
from .spectra import LevelSetQuery, SpectrumResult, level_set_value, level_value, reg_irreg_value, spectrum_curve
from .suspension import abramov_entropy, suspension_level_value
from .systems import (
    SymbolicSystem,
    beta_shift,
    connector_word,
    full_shift,
    golden_mean,
    higher_block_recode,
    sft,
    transition_gap,
    validate_system,
)
from .thermo import average_range, constrained_value, equilibrium_state, pressure

__version__ = "0.1.0"
