"""The sextic side: the 1080 ternary substitutions, the six conics, the cubic
covariant of six roots and the two-parameter normal problem."""

from .conics import ConicSystem, conic_constants, gerbaldi_conics, mixed_discriminant
from .group import (ConicActionError, ValentinerContext, build_valentiner_context, conic_action,
                    invariant_forms, load_generator_data, pointwise_invariance)
from .inflection import InflectionSet, common_zeros, inflection_points
from .normalproblem import (LineDemo, NormalproblemInstance, NormalproblemSolution,
                            OnInvariantCurve, absolute_invariants, covariant_line_demo,
                            escalated_context, normalproblem_forward, nu_ninth_degree,
                            solve_normalproblem)
from .omega import (CubicCovariant, generalized_omega, omega_cubic, quotients,
                    triple_invariants)
