"""helegeo: Hele-Shaw flows, designer potentials, and geodesic rays on P^1.

A numerical toolkit linking increasing families of plane domains (Hele-Shaw
flows with variable permeability) to weak solutions of the Dirichlet problem
for the homogeneous complex Monge-Ampere equation over the disc, including
geodesic rays of Kahler potentials and the detection of their curvature-level
singularities at boundary tangency points.
"""

__version__ = "0.1.0"
