"""Spectral flow, Duhamel integral, Picard solver and empirical probes."""

from .potential import (LipschitzFit, PotentialField, PowerNonlinearity, apply_nonlinearity,
                        lipschitz_fit, nonlinearity_for, realize_potential)
from .probes import (CKNReport, StrichartzReport, ckn_probe, ckn_sides, random_field,
                     scaling_check, scaling_exponent, scaling_transform, strichartz_probe,
                     strichartz_probe_pairs)
from .propagator import (duhamel, duhamel_constant_forcing, free_evolution, free_propagate,
                         homogeneous_norm, hs_norm, kinetic_energy, mass)
from .solver import (AprioriReport, SolveResult, SolveStatus, SolveTrace, apriori_bound, chi,
                     energy, max_contractive_T, picard_solve)

__all__ = [
    "LipschitzFit", "PotentialField", "PowerNonlinearity", "apply_nonlinearity", "lipschitz_fit",
    "nonlinearity_for", "realize_potential", "CKNReport", "StrichartzReport", "ckn_probe",
    "ckn_sides", "random_field", "scaling_check", "scaling_exponent", "scaling_transform",
    "strichartz_probe", "strichartz_probe_pairs", "duhamel", "duhamel_constant_forcing",
    "free_evolution", "free_propagate",
    "homogeneous_norm", "hs_norm", "kinetic_energy", "mass", "AprioriReport", "SolveResult",
    "SolveStatus", "SolveTrace", "apriori_bound", "chi", "energy", "max_contractive_T",
    "picard_solve",
]
