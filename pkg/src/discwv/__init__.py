"""discwv: growth indicators, exceptional sets and local monomial
asymptotics for functions meromorphic in the unit disc.

The package measures, on sampled radius grids, the machinery behind
Wiman-Valiron-style local approximations: the maximum of the tract function
v = log|f/R| on circles, its logarithmic derivative a(r), the admissible
radius schedule eps(r), the exceptional radii where the needed regularity
fails, and the resulting monomial / logarithmic-derivative approximations
near maximum-modulus points, exercised against a catalog of test functions
with closed-form oracles.
"""

from .functions import (CatalogOracle, ComplexPoint, DiscWVError, ExpPole,
                        FunctionSpec, LogPath, NoOracle, OutsideDisc, Pole,
                        PoleOrZeroAt, PowerLaw, PowerSeries, Product,
                        TractSpec, TractViolation, ZeroOrPoleOnPath,
                        catalog_oracle, delta_log, eval_log, logderiv_tower,
                        tract_contains, v_eval)
from .growth import (DomainError, GrowthParams, GrowthProfile, GrowthSample,
                     InsufficientData, NeverAttained, PositiveOrderWindow,
                     WindowRejected, a_estimate, build_profile, epsilon,
                     max_on_circle, max_term_and_central_index,
                     order_estimate, positive_order_window,
                     profile_invariant_report, validate_base_config)
from .exceptional import (ESetReport, E2IntegralResult, ExceptionalRadius,
                          FailureSetReport, NotMonotone, PhiFit,
                          b_local_bound_check, b_local_failure_set,
                          e2_integral_check, e_set_failure, fit_phi_constant,
                          growth_lemma_failure_set, local_growth_excess)
from .verifier import (NotZeroOrder, TruncationDominates, VerificationReport,
                       aeps_divergence_check, classical_asym_check, g_eval,
                       higher_logderiv_check, logderiv_check, monomial_check,
                       tract_disc_check, zero_order_checks, zero_order_sweep)
from .config import (ConfigError, RunConfig, VerifyOptions,
                     coefficients_from_csv, function_spec_from_dict,
                     function_spec_to_dict, load_config)
from .pipelines import MissingArtifact, PipelineError, RunOutcome, merge_report, run

__version__ = "0.1.0"
