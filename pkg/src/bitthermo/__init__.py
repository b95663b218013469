"""Thermodynamics of finite bit strings: counting, temperatures and reversible processes."""

from .bitstring import (BitString, EnumerationCapError, Macrostate, derive_seed,
                        enumerate_microstates, generate_bernoulli, generate_exact,
                        hamming_fraction, log2_binomial, read_packed, read_text,
                        write_packed, write_text)
from .complexity import (ComplexityEstimate, ComplexityEstimator, NoProbeError,
                         StrucTemperature, UnknownEstimatorError, entropy_bound_check,
                         estimate_complexity, get_estimator, structural_temperature)
from .equilibrium import (EquilibriumVerdict, PairRelationResult, failure_rate_sweep,
                          fit_exponential_decay, is_heat_bath, pair_equilibrium,
                          zeroth_law_experiment)
from .processes import (CarnotOutcome, InfeasibleError, MacroTransition, TransformationTable,
                        brute_force_feasible, carnot_efficiency, carnot_run, check_first_law,
                        check_second_law, macro_feasible)
from .thermo import (StatTemperature, binary_entropy, entropy_derivative,
                     occupancy_from_temperature, statistical_temperature, temperature_curve)

__version__ = "0.1.0"
