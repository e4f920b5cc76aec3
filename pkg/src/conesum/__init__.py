"""Numerical Hodge-de Rham spectra on piecewise-conical connected sums.

The package computes p-form Laplacian spectra of model manifolds built as
collapsing connected sums, by separation of variables over sphere modes and
per-channel radial solves, and verifies the quantitative behaviour of the
spectrum under the collapse: convergence to the big summand, a uniform
positive-spectrum lower bound, the kernel of the limit operator with
spectral (APS type) boundary condition, and metric-comparison stability.
"""

__version__ = "0.1.0"

from . import analysis, aps_limit, cone_operator, geometry, radial, sphere_modes  # noqa: F401
