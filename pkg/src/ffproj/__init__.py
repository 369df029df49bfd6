"""Exact exceptional-set experiments for projections over prime fields F_p^n."""

from .errors import GuardExceededError, InvalidInputError
from .grassmann import AffinePlane, Subspace, contains, coset_of, dual, enumerate_subspaces, gaussian_binomial
from .projlab import ExceptionalReport, PointSet, exceptional_set, overlap_number, project, projection_count

__version__ = "0.1.0"
