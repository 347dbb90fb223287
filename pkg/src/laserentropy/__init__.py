"""Laser and atom-laser number statistics and entropy."""

from .entropy import (
    EntropyFlux,
    EntropyValue,
    bec_ground_entropy_closed_form,
    bulk_bose_gas_entropy,
    entropy_flux_maser,
    entropy_flux_thermal,
    laser_entropy_closed_form,
    thermal_entropy_closed_form,
    von_neumann_entropy,
)
from .fock import (
    BecParams,
    FockDistribution,
    LaserParams,
    bec_ground_distribution,
    laser_exact_distribution,
    laser_gaussian,
    laser_shifted_poisson,
    moments,
    planck_occupancy,
    thermal_distribution,
    total_variation,
)

__version__ = "0.1.0"
