"""Exact and high-precision correlation functions for the six-vertex model
with domain wall boundary conditions.

Four independent engines compute the generalized emptiness formation
probability and cross-validate each other at desk scale: direct weighted
enumeration, the inhomogeneous determinant/recurrence pair, the homogeneous
operator determinant, and iterated-residue extraction from the multiple
integral representation.
"""

from .algebra import Jet, TruncatedSeries, UniPoly, det, poly_div_exact, series_invert
from .backends import EXACT, FLOAT, default_precision_bits
from .errors import (BadIndex, BranchPole, DivisionByZero, DuplicateRapidity,
                     GefpLabError, NonphysicalWeights, NotDivisible,
                     NotInvertible, SingularHankel, TooLarge, Unsupported)
from .gefp import (IntegrandSeries, PoleDeformationReport, efp_special_case,
                   gefp_determinant_jets, gefp_residue, pole_deformation_check,
                   residue_workspace)
from .hfun import (HTable, OmegaRho, boundary_H_table_oracle,
                   boundary_H_table_via_K, boundary_H_via_K, build_h_tables,
                   h_generating, h_multivariate, h_polynomial,
                   h_via_inhomogeneous_Z, kfint_check, reflect_substitute)
from .ik import (PhiJet, gefp_homogeneous_nxn, gefp_inhom_determinant,
                 gefp_inhom_recurrence, homogeneous_partition_jets,
                 ik_partition, k_polynomial, partially_inhomogeneous_partition)
from .oracle import (CorrelationResult, NaiveEnumeration, WeightGrid,
                     YoungProfile, all_profiles, boundary_H_oracle,
                     boundary_distribution_oracle, enumerate_naive,
                     gefp_oracle, modified_domain_partition,
                     partition_function_oracle, reduced_partition_oracle,
                     reduced_modified_domain_partition)
from .params import (AnisotropyPoint, SpectralData, VertexWeights,
                     delta_t_from_trig, delta_t_from_weights, exact_sqrt,
                     lambda_eta_from_delta_t, weights_from_trig)

__version__ = "0.1.0"
