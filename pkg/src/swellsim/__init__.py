"""Desk-scale Eulerian simulator for swelling poro-viscoelastic solids.

Spectral tensor-product Galerkin discretization of the coupled momentum /
content-diffusion system on a box, with the deformation gradient and mass
density transported on the quadrature grid, and a per-step ledger auditing
the energy balance and the conservation identities.
"""

__version__ = "0.1.0"
