"""Finite-element continuation toward 1-Laplacian mountain-pass states.

The problem is the threshold equation -div(Du/|Du|) = H(u - beta) |u|^{q-2} u
on a box with zero boundary values.  Solutions are computed for p-Laplacian
relaxations (p > 1) by a minimax path deformation, then continued p -> 1
and beta -> 0 while every explicit a-priori estimate is re-checked on the
discrete states.
"""

from .config import ConfigError, RunConfig, parse_config
from .continuation import (CertifyReport, ContinuationError, MoserBound,
                           RunRecord, SweepResult, ar_surplus_defect,
                           beta_sweep, certify_triple,
                           check_level_monotonicity, eval_I_bv, moser_bound,
                           p_sweep, pnorm_bound, rho_u_integral,
                           superlevel_measure, tie_measure)
from .bv_pairing import (BoundarySignReport, DivergenceReport, PairingReport,
                         boundary_sign_report, bv_norm, extract_flux,
                         flux_sup_norm, green_identity_check, pairing,
                         total_variation, weak_divergence_residual)
from .energy import (EnergyReport, GeometryConstants, SobolevReport,
                     assemble_gradient, detect_ties, eval_F_integral, eval_I,
                     eval_J, eval_mountain_geometry, eval_Qp, grad_lp_energy,
                     linf_norm, load_vector, lp_norm, lr_distance,
                     sobolev_check)
from .fields import FeField, FluxField, SelectionField, selection_rho
from .mesh import (Domain, Mesh, boundary_trace_integral, build_interval_mesh,
                   build_rect_mesh, read_mesh, write_mesh)
from .mpass import (EndpointError, MpassConfig, SaddleResult, SolveError,
                    brute_saddle_oracle, default_bump, find_endpoint,
                    mountain_pass_solve)
from .nonlinearity import (ClarkeInterval, F_beta, ProblemParams,
                           clarke_bounds, clarke_interval, f_beta, heaviside)

__version__ = "0.1.0"
