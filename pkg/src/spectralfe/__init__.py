"""Free energies of spin models from sampled Fourier components of the trace.

The package reconstructs a broadened density of states from samples of
g(t) = Tr exp(-iHt) / 2^n taken through a compact B-spline window, and
integrates it against the Boltzmann factor.  Submodules:

``lattice``   graphs and Hamiltonian specifications
``spectrum``  exact spectra and thermodynamic oracles
``window``    B-spline window, its sampled weights and sinc-power integrals
``plan``      deterministic error-budget planner
``sampler``   exact and noisy Fourier samples
``estimate``  partition-function, free-energy and density-of-states estimates
``noise``     variance propagation and Monte Carlo noise studies
``cli``       JSON-configured experiment driver
"""
from .lattice import *  # noqa: F401,F403
from .spectrum import *  # noqa: F401,F403
from .window import *  # noqa: F401,F403
from .plan import *  # noqa: F401,F403
from .sampler import *  # noqa: F401,F403
from .estimate import *  # noqa: F401,F403
from .noise import *  # noqa: F401,F403
from . import lattice, spectrum, window, plan, sampler, estimate, noise

__version__ = "0.1.0"
