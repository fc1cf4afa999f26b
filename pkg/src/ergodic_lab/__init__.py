"""Exact rearrangements, symmetric-space norms and Dunford-Schwartz averages."""

from .certificate import Certificate
from .measure import (DiscreteVector, PreconditionError, StepFunction, distribution,
                      from_json, in_R_mu, rearrangement, submajorize, to_json,
                      truncation_split)
from .operators import (Composition, Identity, Kernel, SequenceShift, TranslationShift,
                        cesaro_average, maximal_function, operator_from_json, projection,
                        verify_ds)
from .spaces import met_predicate, norm, space_from_json

__version__ = "0.1.0"
