"""Ca2+/NO oscillations and fluid flow in lymphatic vessels.

Modules
-------
params        parameter records, nondimensionalization, lubrication scales
constitutive  pressure-radius laws, least-squares fitting, velocity profiles
filippov      switching-line structure, tangencies, equilibria
integrator    event-detecting simulation of the discontinuous kinetics
cycle         closed-form flows, return map and limit cycle
bifurcation   boundary equilibrium bifurcations and regime maps
pde           leading-order and averaged vessel flow solvers
cli           command-line entry point
"""

__version__ = "0.1.0"
