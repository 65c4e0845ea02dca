"""Numerical free probability: Cauchy transforms, bias transforms, free
convolution and freely infinitely divisible laws."""

from .errors import (DomainError, FreeBiasError, InvalidMeasure, MassDeficitError, ParseError,
                     PreconditionError, SolverError, VerificationError)
from .freeconv import (ConeEstimate, ConeWarning, SubordinatorPair, convolution_root_F,
                       convolution_root_solve, default_cone, free_convolve, free_power,
                       inverse_F, r_transform, replace_one_check, root_support_bound,
                       root_transform, subordinator, subordinator_pair, voiculescu,
                       voiculescu_transform)
from .holomorphic import (AnalyticTransform, TransformKind, TruncatedCone, as_cauchy,
                          cauchy_transform, conjugate_reflection, principal_cbrt,
                          principal_sqrt, reciprocal_transform, tail_normalization_check)
from .infdiv import (LevyTriple, azadi_candidates, cauchy_from_levy, compound_free_poisson,
                     gallery_azadi_cauchy, gallery_azadi_density, gallery_cauchy_levy,
                     gallery_cauchy_levy_density, gallery_semicircle_levy_cauchy,
                     gallery_semicircle_levy_density, levy_from_measure, levy_from_roots,
                     lk_residual, phi_from_levy, polynomial_root_select)
from .inversion import (DensityCurve, curve_cdf, curve_moment, curve_summary, default_grid,
                        measure_from_curve, stieltjes_density, support_detect,
                        transform_moments, write_curve_csv, write_summary_json)
from .measure import (Arcsine, Atom, Atomic, CauchyLaw, FreePoisson, GridDensity, Mixture,
                      MomentSummary, ProbabilityMeasure, Semicircle, dirac, moments,
                      rademacher, scale, shift, support_hull, two_point)
from .transforms import (BiasChainRecord, Step, apply_chain, box_flat_raw,
                         classical_zero_bias, el_gordo, flat_combine, free_zero_bias,
                         inverse_square_bias, square_bias, square_bias_cauchy)

__version__ = "0.1.0"
