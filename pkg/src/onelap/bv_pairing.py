"""Discrete BV calculus: total variation, fluxes, pairing and traces.

Fields are P1, fluxes P0 — the pair for which the pairing and the Green
formula are exact finite-dimensional identities.  The weak normal trace
of a flux on a boundary facet is the normal component of the adjacent
element's vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import flux_divergence, p_flux_vectors
from .fields import FeField, FluxField, SelectionField
from .mesh import Mesh, boundary_trace_integral

__all__ = [
    "PairingReport",
    "DivergenceReport",
    "BoundarySignReport",
    "total_variation",
    "bv_norm",
    "extract_flux",
    "flux_sup_norm",
    "pairing",
    "weak_divergence_residual",
    "boundary_sign_report",
    "green_identity_check",
]


@dataclass(frozen=True)
class PairingReport:
    """Pairing total, TV, and the per-element alignment ratios z.grad(u)/|grad u|."""

    pairing_total: float
    tv_total: float
    ratios: np.ndarray
    min_ratio: float
    max_ratio: float
    active_measure: float


@dataclass(frozen=True)
class DivergenceReport:
    residuals: np.ndarray
    max_abs: float
    l2: float


@dataclass(frozen=True)
class BoundarySignReport:
    integral: float
    max_normal_trace: float
    normal_traces: np.ndarray


def total_variation(u: FeField) -> float:
    """Exact TV of the piecewise-linear representative: sum |grad u|_T |T|."""
    gn = np.linalg.norm(u.element_gradients(), axis=1)
    return float((gn * u.mesh.element_measures).sum())


def bv_norm(u: FeField) -> float:
    """TV plus the boundary trace integral of |u|."""
    return total_variation(u) + boundary_trace_integral(u.mesh, u)


def extract_flux(u: FeField, p: float, gradtol: float = 1e-13) -> FluxField:
    """Per-element flux |grad u|^{p-2} grad u (zero where the gradient vanishes)."""
    if p <= 1.0:
        raise ValueError("extract_flux requires p > 1")
    return FluxField(u.mesh, p_flux_vectors(u, p, gradtol))


def flux_sup_norm(z: FluxField) -> float:
    return float(z.norms().max()) if z.mesh.n_elements else 0.0


def pairing(z: FluxField, u: FeField, w: FeField | None = None,
            eps_act: float | None = None) -> PairingReport:
    """Weighted pairing sum_T mean(w)_T (z_T . grad u_T) |T| plus ratio diagnostics.

    Ratios are reported only on elements with |grad u| above eps_act
    (default 1e-8 * max |grad u|), where the 1-Laplacian direction is
    meaningful.
    """
    if z.mesh is not u.mesh:
        raise ValueError("flux and field must share a mesh")
    mesh = u.mesh
    G = u.element_gradients()
    gn = np.linalg.norm(G, axis=1)
    dots = np.einsum("ed,ed->e", z.vectors, G)
    if w is None:
        wbar = np.ones(mesh.n_elements)
    else:
        wbar = w.values[mesh.elements].mean(axis=1)
    pairing_total = float((wbar * dots * mesh.element_measures).sum())
    tv_total = float((gn * mesh.element_measures).sum())
    if eps_act is None:
        eps_act = 1e-8 * (gn.max() if gn.size else 0.0)
    act = gn > eps_act
    ratios = dots[act] / gn[act]
    if ratios.size:
        mn, mx = float(ratios.min()), float(ratios.max())
    else:
        mn = mx = float("nan")
    return PairingReport(
        pairing_total=pairing_total,
        tv_total=tv_total,
        ratios=ratios,
        min_ratio=mn,
        max_ratio=mx,
        active_measure=float(mesh.element_measures[act].sum()),
    )


def weak_divergence_residual(z: FluxField, rho: SelectionField,
                             mesh: Mesh, degree: int = 5) -> DivergenceReport:
    """Residual of -div z = rho against the interior hat functions.

    For z extracted from a converged solve this is, entry by entry, the
    solver's assembled gradient.
    """
    from .energy import load_vector

    r = flux_divergence(mesh, z.vectors)
    r -= load_vector(rho.u, rho.params, rho.rule, degree)
    r[mesh.boundary_nodes] = 0.0
    return DivergenceReport(residuals=r, max_abs=float(np.abs(r).max()),
                            l2=float(np.linalg.norm(r)))


def _facet_normal_traces(z: FluxField, mesh: Mesh) -> np.ndarray:
    return np.einsum("fd,fd->f", z.vectors[mesh.facet_elements], mesh.facet_normals)


def _facet_mean(mesh: Mesh, values: np.ndarray) -> np.ndarray:
    """Exact facet integral of the linear trace divided by the facet measure."""
    if mesh.dim == 1:
        return values[mesh.facet_nodes[:, 0]]
    return 0.5 * (values[mesh.facet_nodes[:, 0]] + values[mesh.facet_nodes[:, 1]])


def boundary_sign_report(z: FluxField, u: FeField, mesh: Mesh) -> BoundarySignReport:
    """Boundary defect integral of |u| + u [z, nu] and the max normal trace."""
    zn = _facet_normal_traces(z, mesh)
    total = boundary_trace_integral(mesh, u)
    total += float((zn * _facet_mean(mesh, u.values) * mesh.facet_measures).sum())
    return BoundarySignReport(integral=total,
                              max_normal_trace=float(np.abs(zn).max()),
                              normal_traces=zn)


def green_identity_check(z: FluxField, w: FeField, mesh: Mesh) -> float:
    """Defect of the discrete Green identity; <= 1e-12 by construction.

    The weak divergence against every hat (boundary ones included, with
    their facet flux) makes integration by parts an exact identity for
    the P1/P0 pair, so this is an assembly self-test.
    """
    zn = _facet_normal_traces(z, mesh)
    boundary_load = np.zeros(mesh.n_nodes)
    if mesh.dim == 1:
        np.add.at(boundary_load, mesh.facet_nodes[:, 0], zn * mesh.facet_measures)
    else:
        half = 0.5 * zn * mesh.facet_measures
        np.add.at(boundary_load, mesh.facet_nodes[:, 0], half)
        np.add.at(boundary_load, mesh.facet_nodes[:, 1], half)
    # integral of phi_i div z := boundary flux minus the volume term
    div_against_hats = boundary_load - flux_divergence(mesh, z.vectors)
    wdivz = float(w.values @ div_against_hats)
    pair = pairing(z, w).pairing_total
    boundary_term = float((zn * _facet_mean(mesh, w.values) * mesh.facet_measures).sum())
    return abs(wdivz + pair - boundary_term)
