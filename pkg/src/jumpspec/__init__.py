"""Spectral toolkit for the 1D Laplacian with jump-from-the-boundary coupling.

The operator is -d^2/dx^2 on (-pi/2, pi/2) with the three-point condition
psi(-pi/2) = psi(pi*a/2) = psi(pi/2): the generator of Brownian motion
(quadratic variation 2) that restarts at pi*a/2 whenever it hits the
boundary.  Subpackages cover exact parameter arithmetic, closed-form
piecewise-trig function algebra, spectrum enumeration with multiplicities,
the biorthogonal eigensystem, the resolvent, the metric operator, basis
diagnostics, and a Monte Carlo simulator of the process.
"""

from jumpspec.param import ParamA, as_param

__all__ = ["ParamA", "as_param"]
__version__ = "0.1.0"
