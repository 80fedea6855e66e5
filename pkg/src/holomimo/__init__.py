"""Near-field holographic MIMO: evanescent-wave DoF and capacity."""

__version__ = "0.1.0"

from .lattice import (C_EXACT, C_ROUND, Aperture, EmptyInnerRegionError, Radiation, Region,
                      SpectralSupport, WavenumberPoint, build_support, count_lattice,
                      count_summary, gamma)
from .dof import (DofReport, LinkBudget, RegimeError, dof_planar, dof_volumetric,
                  evanescent_dof, gain_fraction, kz_max, rayleigh_distance, ratio_db_for_gain)
from .channel import (AngularChannel, CoupledSigma, FieldGrid, VarianceProfile, apply_shift,
                      couple_sigma, draw_angular, estimate_autocorrelation, sample_ensemble,
                      sample_field, spatial_channel, variance_profile)
from .capacity import (CapacityEstimate, Improvement, Scenario, ergodic_capacity,
                       far_field_baseline, improvement, logdet_capacity, paired_capacity)
