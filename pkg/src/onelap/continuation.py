"""Continuation in p and beta with per-record estimate checks.

Each sweep reuses the relaxed path of the previous cell as a warm start.
Every accepted record is annotated with the explicit a-priori bounds it
must satisfy: the W^{1,p}-norm bound in terms of the level, the Moser
sup-bound, and the level monotonicity across the schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bv_pairing import (boundary_sign_report, extract_flux, flux_sup_norm,
                         pairing, total_variation, weak_divergence_residual)
from .energy import (eval_F_integral, grad_lp_energy, linf_norm, load_vector,
                     lp_norm, lr_distance)
from .fields import FeField, selection_rho
from .mesh import Mesh, boundary_trace_integral
from .mpass import (MpassConfig, SaddleResult, SolveError, find_endpoint,
                    mountain_pass_solve)
from .nonlinearity import ProblemParams, clarke_bounds
from .quadrature import clip_triangle_above, triangle_fraction

__all__ = [
    "MoserBound",
    "RunRecord",
    "SweepResult",
    "CertifyReport",
    "ContinuationError",
    "pnorm_bound",
    "moser_bound",
    "superlevel_measure",
    "tie_measure",
    "rho_u_integral",
    "ar_surplus_defect",
    "eval_I_bv",
    "certify_triple",
    "check_level_monotonicity",
    "p_sweep",
    "beta_sweep",
]


class ContinuationError(RuntimeError):
    """A sweep cell failed; `.records` carries what was completed."""

    def __init__(self, message: str, records=None):
        super().__init__(message)
        self.records = records or []


@dataclass(frozen=True)
class MoserBound:
    """Sup-norm bound via Moser iteration with explicit constants."""

    alpha_star: float
    sigma: float
    theta_p: float
    bound: float
    sup_u: float
    ok: bool
    model: bool = False


@dataclass
class RunRecord:
    """One sweep cell: parameters, solution, and the estimate checks."""

    p: float
    beta: float
    c: float
    grad_residual: float
    lambda_proxy: float
    iterations: int
    status: str
    u: FeField
    grad_lp: float
    pnorm_cap: float
    pnorm_ok: bool
    moser: MoserBound
    sup_u: float
    flux_sup: float
    tv: float
    superlevel: float

    @property
    def ok(self) -> bool:
        return self.status in ("converged", "polished")


@dataclass
class SweepResult:
    records: list[RunRecord]
    endpoint: FeField
    failures: list[str] = field(default_factory=list)
    last_path: np.ndarray | None = None

    @property
    def ok(self) -> bool:
        return not self.failures and all(r.ok for r in self.records)


@dataclass(frozen=True)
class CertifyReport:
    """The flux/selection certificate at one state.

    residual_max:     -div z = rho tested against interior hats
    flux_sup:         max |z_T| (should approach 1 as p -> 1)
    min/mean ratio:   alignment z . grad u / |grad u| on active elements
    clarke_violations: nodal rho values outside the Clarke interval
    boundary_defect:  integral of |u| + u [z, nu] over the boundary
    """

    residual_max: float
    flux_sup: float
    min_ratio: float
    mean_ratio: float
    clarke_violations: int
    boundary_defect: float
    max_normal_trace: float


# -- explicit bounds -----------------------------------------------------------


def pnorm_bound(P: ProblemParams, c: float) -> float:
    """Cap on the W_0^{1,p} energy integral implied by the level c."""
    return P.p_bar * P.q / (P.q - P.p_bar) * c


def moser_bound(u: FeField, P: ProblemParams, c: float,
                degree: int = 5) -> MoserBound:
    """Explicit sup-norm bound from the Moser iteration constants.

    The constant C is the W^{1,p} cap from the level; 1D runs substitute
    N = 2 as in the model-problem convention.
    """
    model = P.dim < 2
    N = 2 if model else P.dim
    p, q = P.p, P.q
    pstar = N * p / (N - p)
    alpha_star = p * pstar / (pstar - (q - p))
    sigma = pstar / alpha_star
    C = pnorm_bound(P, c)
    theta_p = (p * (N - 1.0) / (N - p)) ** (q / p) * C ** ((q - p) / p)
    norm_pstar = lp_norm(u, pstar, degree)
    bound = ((2.0 * theta_p) ** (1.0 / (sigma - 1.0))
             * sigma ** (sigma / (sigma - 1.0) ** 2) * norm_pstar)
    sup_u = linf_norm(u)
    return MoserBound(alpha_star=float(alpha_star), sigma=float(sigma),
                      theta_p=float(theta_p), bound=float(bound),
                      sup_u=float(sup_u), ok=bool(sup_u <= bound * (1.0 + 1e-10)),
                      model=model)


# -- threshold geometry of a state ---------------------------------------------


def superlevel_measure(u: FeField, level: float) -> float:
    """Exact measure of {u > level} for the piecewise-linear representative."""
    mesh = u.mesh
    v = u.values[mesh.elements]
    if mesh.dim == 1:
        a, b = v[:, 0], v[:, 1]
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        frac = np.clip((hi - level) / np.maximum(hi - lo, 1e-300), 0.0, 1.0)
        frac[(hi <= level)] = 0.0
        frac[(lo > level)] = 1.0
        return float((frac * mesh.element_measures).sum())
    total = 0.0
    vmin = v.min(axis=1)
    vmax = v.max(axis=1)
    full = vmin > level
    total += float(mesh.element_measures[full].sum())
    for e in np.flatnonzero(~full & (vmax > level)):
        frac = sum(triangle_fraction(t) for t in clip_triangle_above(v[e], level))
        total += frac * mesh.element_measures[e]
    return total


def tie_measure(u: FeField, level: float) -> float:
    """Measure of elements on which u is identically equal to `level`."""
    mesh = u.mesh
    v = u.values[mesh.elements]
    flat = np.all(v == level, axis=1)
    return float(mesh.element_measures[flat].sum())


def rho_u_integral(u: FeField, P: ProblemParams, rule: str = "pointwise",
                   degree: int = 5) -> float:
    """Integral of rho(u) u (exact: the load vector paired with u itself)."""
    return float(load_vector(u, P, rule, degree) @ u.values)


def ar_surplus_defect(u: FeField, P: ProblemParams, degree: int = 5) -> float:
    """Defect of the threshold Ambrosetti-Rabinowitz identity.

    int rho(u) u - q int F(u) = beta^q |{u > beta}| + beta int_{u = beta} rho,
    where the tie term only sees plateau elements of the linear field.
    """
    lhs = rho_u_integral(u, P, "pointwise", degree) \
        - P.q * eval_F_integral(u, P, degree)
    tie_rho = P.beta ** (P.q - 1.0) * tie_measure(u, P.beta) if P.beta > 0 else 0.0
    rhs = P.beta ** P.q * superlevel_measure(u, P.beta) + P.beta * tie_rho
    return abs(lhs - rhs)


def eval_I_bv(u: FeField, P: ProblemParams, degree: int = 5) -> float:
    """Limit functional: BV norm (TV plus boundary trace) minus the F term."""
    return total_variation(u) + boundary_trace_integral(u.mesh, u) \
        - eval_F_integral(u, P, degree)


# -- certificates --------------------------------------------------------------


def certify_triple(u: FeField, P: ProblemParams, rule: str = "pointwise",
                   degree: int = 5, clarke_tol: float = 1e-10) -> CertifyReport:
    """Check the (u, z, rho) triple: weak equation, flux size, alignment,
    Clarke admissibility of the nodal selection, and the boundary sign term."""
    mesh = u.mesh
    z = extract_flux(u, P.p)
    rho = selection_rho(u, P, rule)
    div = weak_divergence_residual(z, rho, mesh, degree)
    pr = pairing(z, u)
    lo, hi = clarke_bounds(u.values, P)
    bad = (rho.values < lo - clarke_tol) | (rho.values > hi + clarke_tol)
    bnd = boundary_sign_report(z, u, mesh)
    ratios = pr.ratios
    return CertifyReport(
        residual_max=div.max_abs,
        flux_sup=flux_sup_norm(z),
        min_ratio=pr.min_ratio,
        mean_ratio=float(ratios.mean()) if ratios.size else float("nan"),
        clarke_violations=int(bad.sum()),
        boundary_defect=bnd.integral,
        max_normal_trace=bnd.max_normal_trace,
    )


def check_level_monotonicity(records: list[RunRecord], eps_c: float = 1e-6,
                             key: str = "p") -> bool:
    """Levels must be nondecreasing in p (and in beta), up to eps_c slack."""
    rs = sorted(records, key=lambda r: getattr(r, key))
    cs = [r.c for r in rs]
    return all(cs[i] <= cs[i + 1] + eps_c for i in range(len(cs) - 1))


# -- sweeps --------------------------------------------------------------------


def _make_record(P: ProblemParams, res: SaddleResult, degree: int) -> RunRecord:
    u = res.u
    grad_lp = grad_lp_energy(u, P.p)
    cap = pnorm_bound(P, res.c)
    mb = moser_bound(u, P, res.c, degree)
    z = extract_flux(u, P.p)
    return RunRecord(
        p=P.p, beta=P.beta, c=res.c,
        grad_residual=res.grad_residual,
        lambda_proxy=res.lambda_proxy,
        iterations=res.iterations,
        status=res.status,
        u=u,
        grad_lp=grad_lp,
        pnorm_cap=cap,
        pnorm_ok=bool(grad_lp <= cap * (1.0 + 1e-10)),
        moser=mb,
        sup_u=mb.sup_u,
        flux_sup=flux_sup_norm(z),
        tv=total_variation(u),
        superlevel=superlevel_measure(u, P.beta),
    )


def p_sweep(P: ProblemParams, mesh: Mesh, p_values, cfg: MpassConfig | None = None,
            endpoint: FeField | None = None) -> SweepResult:
    """Solve along a decreasing p schedule at fixed beta, warm-starting each
    cell from the previous relaxed path.  The endpoint is found once at
    p_bar and shared by every cell."""
    cfg = cfg or MpassConfig()
    p_values = list(p_values)
    if any(p2 > p1 for p1, p2 in zip(p_values, p_values[1:])):
        raise ValueError("p schedule must be nonincreasing")
    if any(not 1.0 < p <= P.p_bar for p in p_values):
        raise ValueError("p values must lie in (1, p_bar]")
    if endpoint is None:
        endpoint = find_endpoint(P, mesh, cfg=cfg)
    records: list[RunRecord] = []
    failures: list[str] = []
    warm = None
    for p in p_values:
        Pp = P.with_(p=p)
        try:
            res = mountain_pass_solve(Pp, mesh, endpoint, cfg, warm=warm)
        except SolveError as err:
            if err.result is None:
                failures.append(f"p={p:g}: {err}")
                continue
            res = err.result
            failures.append(f"p={p:g}: {err}")
        records.append(_make_record(Pp, res, cfg.degree))
        if res.path is not None:
            warm = res.path
    return SweepResult(records=records, endpoint=endpoint, failures=failures,
                       last_path=warm)


def beta_sweep(P: ProblemParams, mesh: Mesh, beta_values,
               p_schedule=None, cfg: MpassConfig | None = None) -> dict:
    """Solve at p = P.p for a decreasing beta schedule (0 allowed last).

    The endpoint is found once at (p_bar, max beta) — the energy only
    decreases as beta does, so one endpoint serves the whole family.  The
    first cell descends a p schedule; later cells warm-start at p directly
    from the previous beta.  Returns the records plus the L^1 distances of
    each state to the final (smallest-beta) state.
    """
    cfg = cfg or MpassConfig()
    beta_values = list(beta_values)
    if any(b2 > b1 for b1, b2 in zip(beta_values, beta_values[1:])):
        raise ValueError("beta schedule must be nonincreasing")
    beta_max = beta_values[0]
    if p_schedule is None:
        p_schedule = np.linspace(P.p_bar, P.p, 6)
    endpoint = find_endpoint(P.with_(beta=beta_max), mesh, cfg=cfg)

    records: list[RunRecord] = []
    failures: list[str] = []
    warm = None
    for k, beta in enumerate(beta_values):
        Pb = P.with_(beta=beta)
        if k == 0:
            sweep = p_sweep(Pb, mesh, p_schedule, cfg, endpoint=endpoint)
            failures.extend(sweep.failures)
            if not sweep.records:
                raise ContinuationError(
                    f"no solve completed at beta={beta:g}", records)
            records.append(sweep.records[-1])
            warm = sweep.last_path
        else:
            try:
                res = mountain_pass_solve(Pb, mesh, endpoint, cfg, warm=warm)
            except SolveError as err:
                if err.result is None:
                    failures.append(f"beta={beta:g}: {err}")
                    continue
                res = err.result
                failures.append(f"beta={beta:g}: {err}")
            records.append(_make_record(Pb, res, cfg.degree))
            if res.path is not None:
                warm = res.path

    if not records:
        raise ContinuationError("beta sweep produced no records", records)
    ref = records[-1].u
    l1_dists = [lr_distance(r.u, ref, 1.0) for r in records]
    return {
        "records": records,
        "endpoint": endpoint,
        "failures": failures,
        "l1_to_final": l1_dists,
        "ok": not failures and all(r.ok for r in records),
    }
