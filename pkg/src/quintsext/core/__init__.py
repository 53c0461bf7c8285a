from .numbers import (DEFAULT_CONFIG, DegeneracyError, BigComplex, PrecisionError, ToleranceConfig, workprec,
                      parse_complex, format_complex)
from .forms import (DimensionError, HomogeneousForm, act_on_form, evaluate_form, hessian_form,
                    jacobian_det)
from .matrices import (GroupClosureError, LinearSubstitution, MatrixGroup, ProjectivizationError,
                       close_group, projectivize)
from .roots import RootFindingError, find_roots, poly_from_roots, polyval
