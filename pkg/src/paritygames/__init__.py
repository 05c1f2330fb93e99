"""Simulation and analysis toolkit for parity/modulo interference games.

Two parties play against a referee who hides one dit per box; Alice
threads classical or quantum resources through the boxes and Bob must
output a weighted sum of the hidden inputs modulo a prime.  The package
simulates box strategies exactly (density operators, controlled Kraus
channels, POVMs), computes interference and dual terms by full input
enumeration, reads off algebraic interference orders from Fourier
spectra, and turns detected orders into lower bounds on the number of
systems involved.
"""

from .games import (
    ConditionalDistribution,
    FourierSpectrum,
    GameSpec,
    InterferenceReport,
    algebraic_order,
    dual_term,
    fourier_spectrum,
    game_dual_equivalence,
    interference_report,
    interference_term,
    load_distribution,
    modulo_marginal_matrix,
    product_distribution,
    save_distribution,
    synthesize_order_n_distribution,
    uniform_distribution,
    win_probability,
)
from .numkit import (
    DitString,
    Permutation,
    fourier_matrix,
    is_prime,
    tensor_product,
    weighted_mod_sum,
)
from .quantum import (
    BoxProgram,
    DensityState,
    DimensionCapError,
    PathedHilbert,
    Povm,
    average_state_collapse_check,
    classical_dephase,
    controlled_channel,
    evolve,
    measure,
    modulo_average_state,
    run_experiment,
)
from .strategies import (
    CountingStrategy,
    Strategy,
    WitnessResult,
    additivity_lower_bound,
    binary_phase_strategy,
    classical_counting_strategy,
    compose_modulo_strategies,
    dary_phase_strategy,
    particle_number_witness,
    pretty_good_measurement,
)

__version__ = "0.1.0"

__all__ = [
    "BoxProgram",
    "ConditionalDistribution",
    "CountingStrategy",
    "DensityState",
    "DimensionCapError",
    "DitString",
    "FourierSpectrum",
    "GameSpec",
    "InterferenceReport",
    "PathedHilbert",
    "Permutation",
    "Povm",
    "Strategy",
    "WitnessResult",
    "additivity_lower_bound",
    "algebraic_order",
    "average_state_collapse_check",
    "binary_phase_strategy",
    "classical_counting_strategy",
    "classical_dephase",
    "compose_modulo_strategies",
    "controlled_channel",
    "dary_phase_strategy",
    "dual_term",
    "evolve",
    "fourier_matrix",
    "fourier_spectrum",
    "game_dual_equivalence",
    "interference_report",
    "interference_term",
    "is_prime",
    "load_distribution",
    "measure",
    "modulo_average_state",
    "modulo_marginal_matrix",
    "particle_number_witness",
    "pretty_good_measurement",
    "product_distribution",
    "run_experiment",
    "save_distribution",
    "synthesize_order_n_distribution",
    "tensor_product",
    "uniform_distribution",
    "weighted_mod_sum",
    "win_probability",
]
