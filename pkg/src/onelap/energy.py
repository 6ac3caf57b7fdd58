"""Energies Q_p, J, I on the P1 space, their gradients, and the explicit
mountain-pass geometry constants.

The threshold integrands are integrated by splitting every element at the
level set {u = beta} of the linear interpolant: exactly (closed forms) in
1D, and by polygon clipping followed by a fixed-order triangle rule in 2D.
This keeps the quadrature spectrally accurate on each smooth piece and
makes the assembled gradient the exact derivative of the discrete energy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import FeField
from .mesh import Mesh
from .nonlinearity import ProblemParams
from .quadrature import triangle_rule

__all__ = [
    "EnergyReport",
    "GeometryConstants",
    "SobolevReport",
    "eval_Qp",
    "grad_lp_energy",
    "eval_F_integral",
    "eval_J",
    "eval_I",
    "load_vector",
    "assemble_gradient",
    "flux_divergence",
    "eval_mountain_geometry",
    "sobolev_check",
    "lp_norm",
    "linf_norm",
    "lr_distance",
    "detect_ties",
]

_TINY = 1e-14


@dataclass(frozen=True)
class EnergyReport:
    """The four energy values at a field: Q_p, the F-integral, J and I."""

    Qp: float
    Fint: float
    J: float
    I: float


@dataclass(frozen=True)
class GeometryConstants:
    """Explicit mountain-pass ring constants (independent of beta).

    C_geom feeds the ring radius r; alpha = r^q / p_bar is the level
    floor; theta is the Sobolev factor p (N-1)/(N-p).  `model` marks 1D
    runs where the N = 2 formulas are substituted.
    """

    C_geom: float
    r: float
    alpha: float
    theta: float
    model: bool = False


@dataclass(frozen=True)
class SobolevReport:
    lhs: float
    rhs: float
    ok: bool
    pstar: float
    model: bool = False


# -- smooth part ---------------------------------------------------------------


def grad_lp_energy(u: FeField, p: float) -> float:
    """Integral of |grad u|^p (exact for P1 fields)."""
    gn = np.linalg.norm(u.element_gradients(), axis=1)
    return float(np.sum(gn**p * u.mesh.element_measures))


def eval_Qp(u: FeField, p: float) -> float:
    """(1/p) * integral of |grad u|^p."""
    if p <= 1.0:
        raise ValueError("eval_Qp requires p > 1")
    return grad_lp_energy(u, p) / p


# -- threshold integrals -------------------------------------------------------


def _fint_load_1d(mesh: Mesh, values: np.ndarray, P: ProblemParams,
                  rho_tie: float, want_load: bool):
    """Closed-form per-element F-integral and load vector in 1D."""
    q, beta = P.q, P.beta
    els = mesh.elements
    a = values[els[:, 0]]
    b = values[els[:, 1]]
    h = mesh.element_measures
    fint = np.zeros(len(h))
    load = np.zeros((len(h), 2)) if want_load else None

    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    const = np.abs(b - a) <= _TINY * scale
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)

    # constant elements
    idx = np.flatnonzero(const)
    if len(idx):
        c = 0.5 * (a[idx] + b[idx])
        above = c > beta
        fint[idx[above]] = h[idx[above]] * (c[above] ** q - beta**q) / q
        if want_load:
            lv = np.where(above, np.abs(c) ** (q - 1.0), 0.0)
            tie = np.abs(c - beta) <= _TINY * scale[idx]
            lv = np.where(tie & ~above, rho_tie, lv)
            load[idx, 0] = 0.5 * h[idx] * lv
            load[idx, 1] = 0.5 * h[idx] * lv

    # steep sloped elements with an active part: closed forms
    steep = ~const & (np.abs(b - a) > 0.05 * scale)
    idx = np.flatnonzero(steep & (hi > beta))
    if len(idx):
        d = b[idx] - a[idx]
        t0 = np.maximum(lo[idx], beta)
        t1 = hi[idx]
        ad = np.abs(d)
        fint[idx] = h[idx] / (ad * q) * (
            (t1 ** (q + 1.0) - t0 ** (q + 1.0)) / (q + 1.0) - beta**q * (t1 - t0)
        )
        if want_load:
            i0 = (t1**q - t0**q) / (q * ad)
            i1 = ((t1 ** (q + 1.0) - t0 ** (q + 1.0)) / (q + 1.0)
                  - a[idx] * (t1**q - t0**q) / q) / (ad * d)
            load[idx, 0] = h[idx] * (i0 - i1)
            load[idx, 1] = h[idx] * i1

    # shallow sloped elements: the closed forms cancel catastrophically
    # (error ~ eps (u/d)^2), so integrate the active part in the chart
    # u = a + d s by Gauss quadrature instead
    idx = np.flatnonzero(~const & ~steep & (hi > beta))
    if len(idx):
        from .quadrature import gauss_unit_interval

        x6, w6 = gauss_unit_interval(6)
        d = b[idx] - a[idx]
        s_cross = np.clip((beta - a[idx]) / d, 0.0, 1.0)
        sa = np.where(d > 0.0, s_cross, 0.0)
        sb = np.where(d > 0.0, 1.0, s_cross)
        width = sb - sa
        s = sa[:, None] + width[:, None] * x6[None, :]
        u_s = a[idx, None] + d[:, None] * s
        hw = h[idx] * width
        fint[idx] = hw * (((u_s**q - beta**q) / q) @ w6)
        if want_load:
            rho_s = u_s ** (q - 1.0)
            load[idx, 0] = hw * (((1.0 - s) * rho_s) @ w6)
            load[idx, 1] = hw * ((s * rho_s) @ w6)
    return fint, load


def _bracket_integrals(t0, t1, v_lo, v_hi, wb, D, lower, q, beta, meas):
    """Exact integrals of F g and rho g phi over one coarea bracket.

    The bracket is [t0, t1] (already clipped to the active side of beta)
    with density g(t) = 2 tau / (wb D), tau the distance to the apex
    value (v_lo for the lower bracket, v_hi mirrored for the upper one).
    Mean hat values along the level segments are linear in tau, so every
    term reduces to power moments of t.  Narrow brackets fall back to
    Gauss quadrature in t, where the closed forms cancel.

    Returns (fint, load_apex, load_mid, load_far) scaled by the element
    measure; "apex/mid/far" refer to the sorted local vertices.
    """
    out_f = np.zeros_like(t0)
    loads = np.zeros((3, len(t0)))
    if not len(t0):
        return out_f, loads
    apex = v_lo if lower else v_hi

    narrow = (t1 - t0) <= 0.05 * np.maximum(1.0, np.abs(t1))
    wide = ~narrow
    if wide.any():
        a, b = t0[wide], t1[wide]
        vl, vh = v_lo[wide], v_hi[wide]
        wbv, Dv = wb[wide], D[wide]

        def Pm(k):
            return (b ** (q + k) - a ** (q + k)) / (q + k)

        def Qm(k):
            return ((b ** (q + 1 + k) - a ** (q + 1 + k)) / (q + 1 + k)
                    - beta**q * (b ** (1 + k) - a ** (1 + k)) / (1 + k)) / q

        P0, P1, P2 = Pm(0), Pm(1), Pm(2)
        if lower:
            tau1 = P1 - vl * P0                  # int t^{q-1} tau
            tau2 = P2 - 2.0 * vl * P1 + vl**2 * P0
            Ftau = Qm(1) - vl * Qm(0)
            out_f[wide] = 2.0 * Ftau / (wbv * Dv)
            # g phi_apex = 2 tau/(wb D) - tau^2 (1/wb + 1/D)/(wb D)
            loads[0, wide] = (2.0 * tau1 - tau2 * (1.0 / wbv + 1.0 / Dv)) / (wbv * Dv)
            loads[1, wide] = tau2 / (wbv**2 * Dv)
            loads[2, wide] = tau2 / (wbv * Dv**2)
        else:
            sig1 = vh * P0 - P1                  # int t^{q-1} sigma
            sig2 = vh**2 * P0 - 2.0 * vh * P1 + P2
            Fsig = vh * Qm(0) - Qm(1)
            out_f[wide] = 2.0 * Fsig / (wbv * Dv)
            loads[0, wide] = (2.0 * sig1 - sig2 * (1.0 / wbv + 1.0 / Dv)) / (wbv * Dv)
            loads[1, wide] = sig2 / (wbv**2 * Dv)
            loads[2, wide] = sig2 / (wbv * Dv**2)
    if narrow.any():
        from .quadrature import gauss_unit_interval

        xg, wg = gauss_unit_interval(10)
        a, b = t0[narrow], t1[narrow]
        wbv, Dv = wb[narrow], D[narrow]
        width = b - a
        t = a[:, None] + width[:, None] * xg[None, :]
        tau = (t - apex[narrow, None]) if lower else (apex[narrow, None] - t)
        g = 2.0 * tau / (wbv * Dv)[:, None]
        rho = t ** (q - 1.0)
        Fv = (t**q - beta**q) / q
        out_f[narrow] = width * ((Fv * g) @ wg)
        loads[0, narrow] = width * ((rho * (g - g * tau
                           * 0.5 * (1.0 / wbv + 1.0 / Dv)[:, None])) @ wg)
        loads[1, narrow] = width * ((rho * g * tau * 0.5 / wbv[:, None]) @ wg)
        loads[2, narrow] = width * ((rho * g * tau * 0.5 / Dv[:, None]) @ wg)
    out_f *= meas
    loads *= meas
    return out_f, loads


def _fint_load_2d(mesh: Mesh, values: np.ndarray, P: ProblemParams,
                  rho_tie: float, want_load: bool, degree: int):
    """Exact threshold integrals on triangles via the coarea density.

    For linear u on a triangle the distribution density of u is piecewise
    linear on [v1, v2] and [v2, v3] (sorted vertex values), and the mean
    of each hat function along a level segment is linear in the level, so
    int F(u) and int rho(u) phi_i reduce to 1D power moments.  `degree`
    is accepted for interface parity but unused: the integrals are exact.
    """
    del degree
    q, beta = P.q, P.beta
    els = mesh.elements
    v = values[els]                      # (nel, 3)
    meas = mesh.element_measures
    fint = np.zeros(len(v))
    load = np.zeros((len(v), 3)) if want_load else None

    order = np.argsort(v, axis=1)
    vs = np.take_along_axis(v, order, axis=1)
    v1, v2, v3 = vs[:, 0], vs[:, 1], vs[:, 2]
    scale = np.maximum(1.0, np.abs(vs).max(axis=1))
    D = v3 - v1

    # (near-)constant elements
    const = D <= _TINY * scale
    idx = np.flatnonzero(const)
    if len(idx):
        c = v.mean(axis=1)[idx]
        above = c > beta
        fint[idx[above]] = meas[idx[above]] * (c[above] ** q - beta**q) / q
        if want_load:
            lv = np.where(above, np.abs(c) ** (q - 1.0), 0.0)
            tie = np.abs(c - beta) <= _TINY * scale[idx]
            lv = np.where(tie & ~above, rho_tie, lv)
            load[idx] = (meas[idx] * lv / 3.0)[:, None]

    loads_sorted = np.zeros((len(v), 3)) if want_load else None

    # lower bracket [v1, v2], apex v1
    act = ~const & (v2 > beta) & (v2 - v1 > 0.0)
    idx = np.flatnonzero(act)
    if len(idx):
        t0 = np.maximum(v1[idx], beta)
        t1 = v2[idx]
        fb, lb = _bracket_integrals(t0, t1, v1[idx], v2[idx],
                                    v2[idx] - v1[idx], D[idx],
                                    True, q, beta, meas[idx])
        fint[idx] += fb
        if want_load:
            loads_sorted[idx, 0] += lb[0]    # apex = sorted vertex 1
            loads_sorted[idx, 1] += lb[1]    # mid  = sorted vertex 2
            loads_sorted[idx, 2] += lb[2]    # far  = sorted vertex 3

    # upper bracket [v2, v3], apex v3
    act = ~const & (v3 > beta) & (v3 - v2 > 0.0)
    idx = np.flatnonzero(act)
    if len(idx):
        t0 = np.maximum(v2[idx], beta)
        t1 = v3[idx]
        fb, lb = _bracket_integrals(t0, t1, v2[idx], v3[idx],
                                    v3[idx] - v2[idx], D[idx],
                                    False, q, beta, meas[idx])
        fint[idx] += fb
        if want_load:
            loads_sorted[idx, 2] += lb[0]    # apex = sorted vertex 3
            loads_sorted[idx, 1] += lb[1]    # mid  = sorted vertex 2
            loads_sorted[idx, 0] += lb[2]    # far  = sorted vertex 1

    if want_load:
        # scatter the sorted-order loads back to the local vertex order
        unsorted = np.zeros_like(loads_sorted)
        np.put_along_axis(unsorted, order, loads_sorted, axis=1)
        load += unsorted
    return fint, load


def _fint_load(u: FeField, P: ProblemParams, rule: str,
               want_load: bool, degree: int):
    if rule not in ("pointwise", "lower", "upper"):
        raise ValueError(f"unknown selection rule {rule!r}")
    rho_tie = 0.0 if rule == "lower" or P.beta == 0.0 else P.beta ** (P.q - 1.0)
    if u.mesh.dim == 1:
        return _fint_load_1d(u.mesh, u.values, P, rho_tie, want_load)
    return _fint_load_2d(u.mesh, u.values, P, rho_tie, want_load, degree)


def eval_F_integral(u: FeField, P: ProblemParams, degree: int = 5) -> float:
    """Integral of F_beta(u) over the domain (exact splitting at u = beta)."""
    fint, _ = _fint_load(u, P, "pointwise", False, degree)
    return float(fint.sum())


def load_vector(u: FeField, P: ProblemParams, rule: str = "pointwise",
                degree: int = 5) -> np.ndarray:
    """Nodal vector of integrals rho(u) * phi_i over all nodes."""
    _, load = _fint_load(u, P, rule, True, degree)
    out = np.zeros(u.mesh.n_nodes)
    np.add.at(out, u.mesh.elements, load)
    return out


def eval_J(u: FeField, P: ProblemParams, degree: int = 5) -> float:
    return eval_Qp(u, P.p) - eval_F_integral(u, P, degree)


def eval_I(u: FeField, P: ProblemParams, degree: int = 5) -> EnergyReport:
    """Assemble Q_p, the F-integral, J = Q_p - F and I = J + (p-1)/p |Omega|."""
    Qp = eval_Qp(u, P.p)
    Fint = eval_F_integral(u, P, degree)
    J = Qp - Fint
    I = J + (P.p - 1.0) / P.p * u.mesh.domain.measure
    return EnergyReport(Qp=Qp, Fint=Fint, J=J, I=I)


# -- gradient ------------------------------------------------------------------


def p_flux_vectors(u: FeField, p: float, gradtol: float = 1e-13) -> np.ndarray:
    """Per-element |grad u|^{p-2} grad u, zero where |grad u| < gradtol."""
    G = u.element_gradients()
    gn = np.linalg.norm(G, axis=1)
    fac = np.zeros_like(gn)
    act = gn >= gradtol
    fac[act] = gn[act] ** (p - 2.0)
    return fac[:, None] * G


def flux_divergence(mesh: Mesh, vectors: np.ndarray) -> np.ndarray:
    """Per-node assembly of sum_T z_T . grad(phi_i) |T| over all nodes."""
    contrib = np.einsum("ed,evd->ev", vectors, mesh.basis_gradients)
    contrib *= mesh.element_measures[:, None]
    out = np.zeros(mesh.n_nodes)
    np.add.at(out, mesh.elements, contrib)
    return out


def assemble_gradient(u: FeField, P: ProblemParams, rule: str = "pointwise",
                      degree: int = 5, gradtol: float = 1e-13) -> np.ndarray:
    """Nodal residual of J: flux term minus selection load, zero on the boundary."""
    g = flux_divergence(u.mesh, p_flux_vectors(u, P.p, gradtol))
    g -= load_vector(u, P, rule, degree)
    g[u.mesh.boundary_nodes] = 0.0
    return g


def detect_ties(u: FeField, P: ProblemParams) -> np.ndarray:
    """Indices of nodes sitting exactly on the threshold value."""
    return np.flatnonzero(u.values == P.beta)


# -- geometry constants and norms ---------------------------------------------


def eval_mountain_geometry(P: ProblemParams, domain_measure: float) -> GeometryConstants:
    """Explicit ring radius r, level floor alpha and the constants they need.

    For the 1D model problem the N = 2 formulas are evaluated and the
    result is flagged `model`.
    """
    model = P.dim < 2
    N = 2 if model else P.dim
    pb, q = P.p_bar, P.q
    C = (pb * (N - 1.0) / (np.sqrt(N) * (N - pb))) ** q * max(1.0, domain_measure)
    r = (1.0 / (pb * C + 1.0)) ** (1.0 / (q - pb))
    alpha = r**q / pb
    theta = P.p * (N - 1.0) / (N - P.p) if not model else P.p / (2.0 - P.p)
    return GeometryConstants(C_geom=float(C), r=float(r), alpha=float(alpha),
                             theta=float(theta), model=model)


def lp_norm(u: FeField, r: float, degree: int = 5) -> float:
    """L^r norm of the piecewise-linear field by per-element quadrature."""
    mesh = u.mesh
    v = u.values[mesh.elements]
    if mesh.dim == 1:
        from .quadrature import gauss_unit_interval

        x, w = gauss_unit_interval(6)
        uq = v[:, 0, None] * (1.0 - x) + v[:, 1, None] * x
    else:
        B, w = triangle_rule(degree)
        uq = v @ B.T
    val = (np.abs(uq) ** r) @ w
    return float((val * mesh.element_measures).sum() ** (1.0 / r))


def linf_norm(u: FeField) -> float:
    return float(np.abs(u.values).max())


def lr_distance(u: FeField, v: FeField, r: float, degree: int = 4) -> float:
    """L^r distance of two P1 fields on the same mesh (order-4 quadrature)."""
    if u.mesh is not v.mesh and u.mesh.n_nodes != v.mesh.n_nodes:
        raise ValueError("fields must live on the same mesh")
    diff = FeField(u.mesh, u.values - v.values, dirichlet=False)
    return lp_norm(diff, r, degree)


def sobolev_check(u: FeField, P: ProblemParams, degree: int = 5) -> SobolevReport:
    """Check ||u||_{p*} <= (theta/sqrt(N)) ||grad u||_p with theta = p(N-1)/(N-p).

    1D model runs substitute N = 2 and use the max norm for the left side.
    """
    if not u.dirichlet:
        raise ValueError("sobolev_check needs a Dirichlet field")
    model = P.dim < 2
    N = 2 if model else P.dim
    p = P.p
    pstar = N * p / (N - p)
    theta = p * (N - 1.0) / (N - p)
    rhs = theta / np.sqrt(N) * grad_lp_energy(u, p) ** (1.0 / p)
    lhs = linf_norm(u) if model else lp_norm(u, pstar, degree)
    ok = lhs <= rhs * (1.0 + 1e-10)
    return SobolevReport(lhs=float(lhs), rhs=float(rhs), ok=bool(ok),
                         pstar=float("inf") if model else float(pstar), model=model)
