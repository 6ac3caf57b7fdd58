"""Minimax path-deformation solver for the mountain-pass level of I.

A discrete path from 0 to the endpoint e is relaxed by Armijo descent on
every free point with even re-parameterization by chord length (the
highest point of the relaxed path approaches the saddle), then the peak
state is polished to a critical point.  When the barrier sits at a much
smaller scale than the endpoint, the path is repeatedly shrunk toward the
origin until the barrier is resolved.  A brute-force grid oracle for
meshes with at most two interior degrees of freedom provides an
independent check of the level.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .energy import (assemble_gradient, eval_I, eval_mountain_geometry,
                     grad_lp_energy)
from .fields import FeField
from .mesh import Mesh
from .nonlinearity import ProblemParams

__all__ = [
    "MpassConfig",
    "SaddleResult",
    "SolveError",
    "EndpointError",
    "find_endpoint",
    "default_bump",
    "mountain_pass_solve",
    "brute_saddle_oracle",
]


class SolveError(RuntimeError):
    """Raised when the minimax solve fails; `.result` carries diagnostics."""

    def __init__(self, message: str, result: "SaddleResult | None" = None):
        super().__init__(message)
        self.result = result


class EndpointError(RuntimeError):
    pass


@dataclass
class MpassConfig:
    """Knobs of the minimax descent: path size, step rule, and tolerances."""

    m: int = 16                    # path segments (>= 8)
    max_outer: int = 200           # outer relaxation iterations
    step0: float = 0.5             # initial descent step per path point
    armijo: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 40
    eps_g: float = 1e-6            # gradient residual tolerance (max norm)
    eps_c: float = 1e-7            # level stagnation tolerance
    stagnation_window: int = 5
    delta_e: float = 0.1           # endpoint margin: I(e) < I(0) - delta_e
    endpoint_cap: float = 2.0**40  # cap on the endpoint scaling factor
    max_shrinks: int = 60          # path re-scalings toward the origin
    polish: bool = True            # critical-point polish of the peak state
    polish_iters: int = 4000
    degree: int = 5                # quadrature degree for threshold terms

    def __post_init__(self) -> None:
        if self.m < 8:
            raise ValueError("path segment count m must be >= 8")
        for name in ("step0", "eps_g", "eps_c", "delta_e"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")


@dataclass
class SaddleResult:
    u: FeField
    c: float
    grad_residual: float
    iterations: int
    lambda_proxy: float
    status: str = "converged"
    path: np.ndarray | None = None
    trace: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status in ("converged", "polished")


def default_bump(mesh: Mesh) -> FeField:
    """Tent (1D) / pyramid-product (2D) bump with peak value 1."""
    L = mesh.domain.lengths
    if mesh.dim == 1:
        vals = 1.0 - np.abs(2.0 * mesh.nodes[:, 0] / L[0] - 1.0)
    else:
        vx = 1.0 - np.abs(2.0 * mesh.nodes[:, 0] / L[0] - 1.0)
        vy = 1.0 - np.abs(2.0 * mesh.nodes[:, 1] / L[1] - 1.0)
        vals = vx * vy
    vals[mesh.boundary_nodes] = 0.0
    return FeField(mesh, vals, dirichlet=True)


def find_endpoint(P: ProblemParams, mesh: Mesh, bump: FeField | None = None,
                  cfg: MpassConfig | None = None) -> FeField:
    """Scale the bump until I at (p_bar, beta) drops below I(0) - delta_e.

    A doubling search brackets the crossing, then bisection pins the
    smallest admissible scale, which keeps the path endpoint as close to
    the barrier as the margin allows.  Computed once per sweep at the cap
    exponent, so the same endpoint serves every (p, beta) cell.
    """
    cfg = cfg or MpassConfig()
    if bump is None:
        bump = default_bump(mesh)
    if float(bump.values.min()) < 0.0:
        raise EndpointError("bump must be nonnegative")
    if float(bump.values.max()) <= P.beta:
        raise EndpointError("bump never exceeds the threshold beta")
    Pbar = P.with_(p=P.p_bar)
    target = eval_I(FeField.zeros(mesh), Pbar, cfg.degree).I - cfg.delta_e

    def level(t: float) -> float:
        return eval_I(bump.scaled(t), Pbar, cfg.degree).I

    t = 1.0
    while level(t) >= target:
        t *= 2.0
        if t > cfg.endpoint_cap:
            raise EndpointError(
                "endpoint scaling cap reached; q may be too close to p_bar "
                "or the mesh too coarse")
    lo, hi = t / 2.0, t
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if level(mid) < target:
            hi = mid
        else:
            lo = mid
    # small margin past the crossing keeps I(e) strictly below the target
    return bump.scaled(hi * (1.0 + 1e-3))


# -- path machinery ------------------------------------------------------------


def _respace(path: np.ndarray) -> np.ndarray:
    """Even chord-length re-parameterization keeping the endpoints."""
    d = np.linalg.norm(np.diff(path, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(d)])
    total = s[-1]
    if total <= 0.0:
        return path
    snew = np.linspace(0.0, total, len(path))
    j = np.clip(np.searchsorted(s, snew[1:-1], side="right"), 1, len(s) - 1)
    seg = np.maximum(s[j] - s[j - 1], 1e-300)
    w = (snew[1:-1] - s[j - 1]) / seg
    out = np.empty_like(path)
    out[0] = path[0]
    out[-1] = path[-1]
    out[1:-1] = path[j - 1] * (1.0 - w)[:, None] + path[j] * w[:, None]
    return out


def mountain_pass_solve(P: ProblemParams, mesh: Mesh, e: FeField,
                        cfg: MpassConfig | None = None,
                        warm: np.ndarray | None = None) -> SaddleResult:
    """Compute the mountain-pass state and level of I on the P1 space.

    Relaxes a discrete path 0 -> e (Armijo descent of each free point,
    even re-parameterization every outer iteration).  If the whole
    interior of the relaxed path falls below the start level, the barrier
    lies inside the first segment and the path is shrunk onto it.  The
    final peak state is polished to a critical point.  Raises SolveError
    (with the partial result attached) if the residual tolerance fails.
    """
    cfg = cfg or MpassConfig()

    def energy(x: np.ndarray) -> float:
        return eval_I(FeField(mesh, x, dirichlet=True), P, cfg.degree).I

    def grad(x: np.ndarray) -> np.ndarray:
        return assemble_gradient(FeField(mesh, x, dirichlet=True), P,
                                 "pointwise", cfg.degree)

    geom = eval_mountain_geometry(P, mesh.domain.measure)
    I0 = energy(np.zeros(mesh.n_nodes))
    trace: list = []
    iterations = 0
    shrinks = 0
    m = cfg.m

    if warm is not None:
        path = np.array(warm, dtype=float)
        path[0] = 0.0
        path[-1] = e.values
        m = len(path) - 1
    else:
        t = np.linspace(0.0, 1.0, m + 1)
        path = t[:, None] * e.values[None, :]

    steps = np.full(m + 1, cfg.step0)
    E = np.array([energy(row) for row in path])
    c_hist: list[float] = []
    status = "budget"
    kpk = m // 2

    outer = 0
    while outer < cfg.max_outer:
        outer += 1
        iterations += 1
        for k in range(1, m):
            x = path[k]
            g = grad(x)
            gn2 = float(g @ g)
            if gn2 == 0.0:
                continue
            t = steps[k]
            fx = E[k]
            accepted = False
            for _ in range(cfg.max_backtracks):
                xn = x - t * g
                fn = energy(xn)
                if fn <= fx - cfg.armijo * t * gn2:
                    accepted = True
                    break
                t *= cfg.backtrack
            if accepted:
                path[k] = xn
                E[k] = fn
                steps[k] = min(t / cfg.backtrack, 1e6)
            else:
                steps[k] = max(t, 1e-14)

        path = _respace(path)
        E = np.array([energy(row) for row in path])
        kpk = 1 + int(np.argmax(E[1:m]))
        c = float(E[kpk])
        c_hist.append(c)

        # barrier inside the first segment: every free point is already
        # below the start level, so zoom the path onto segment [0, 1]
        if c <= I0 + cfg.eps_c * (1.0 + abs(I0)):
            if shrinks >= cfg.max_shrinks:
                status = "collapse"
                break
            shrinks += 1
            tail = path[1]
            if energy(tail) > I0 - 0.5 * cfg.delta_e:
                status = "collapse"
                break
            t = np.linspace(0.0, 1.0, m + 1)
            path = t[:, None] * tail[None, :]
            steps = np.full(m + 1, cfg.step0)
            E = np.array([energy(row) for row in path])
            c_hist.clear()
            continue

        gpk = grad(path[kpk])
        res = float(np.abs(gpk).max())
        trace.append((iterations, c, res))

        if res <= cfg.eps_g:
            status = "converged"
            break
        if (len(c_hist) > cfg.stagnation_window
                and abs(c_hist[-1] - c_hist[-1 - cfg.stagnation_window])
                <= cfg.eps_c * (1.0 + abs(c))):
            status = "stagnated"
            break

    x = path[kpk].copy()
    c = float(E[kpk])

    if status in ("stagnated", "budget") and cfg.polish:
        x, status = _polish_peak(P, mesh, cfg, path, kpk, energy, grad,
                                 I0, geom.alpha, status)
        c = energy(x)
        # store the polished state in the path so warm-started continuation
        # cells start their own polish from it
        path[kpk] = x

    g = grad(x)
    res = float(np.abs(g).max())
    lam = _lambda_proxy(mesh, FeField(mesh, x, dirichlet=True), P, g)
    final_status = status if res <= cfg.eps_g and status != "collapse" else (
        "collapse" if status == "collapse" else "budget")
    result = SaddleResult(
        u=FeField(mesh, x, dirichlet=True),
        c=c,
        grad_residual=res,
        iterations=iterations,
        lambda_proxy=lam,
        status=final_status,
        path=path,
        trace=trace,
    )
    if not result.ok:
        raise SolveError(
            f"minimax solve ended with status {result.status!r} "
            f"(residual {res:.3e}, tolerance {cfg.eps_g:.3e})", result)
    return result


def _delta_newton(P, mesh, cfg, x0) -> np.ndarray:
    """Damped Newton on the delta-regularized residual, driving delta to 0.

    The flux map g -> |g|^{p-2} g has infinite slope at g = 0, so states
    with flat plateau elements (which the saddle develops as p -> 1) stall
    every unregularized root finder.  Replacing the weight by
    (|g|^2 + delta^2)^{(p-2)/2} smooths the kink; following the solution
    branch delta: 1e-2 -> 0 with warm starts lands on the exact critical
    point of the original residual.
    """
    from .energy import load_vector

    idx = mesh.interior_nodes
    nn = mesh.n_nodes
    bg = mesh.basis_gradients
    meas = mesh.element_measures
    rows = np.repeat(mesh.elements[:, :, None], mesh.dim + 1, axis=2).ravel()
    cols = np.repeat(mesh.elements[:, None, :], mesh.dim + 1, axis=1).ravel()
    eye = np.eye(mesh.dim)

    def load(x):
        return load_vector(FeField(mesh, x, dirichlet=True), P,
                           "pointwise", cfg.degree)

    def weights(G, delta):
        gn2 = (G**2).sum(axis=1)
        s = gn2 + delta * delta
        w = np.zeros_like(s)
        wp = np.zeros_like(s)
        pos = s > 0.0
        w[pos] = s[pos] ** ((P.p - 2.0) / 2.0)
        wp[pos] = (P.p - 2.0) * s[pos] ** ((P.p - 4.0) / 2.0)
        return w, wp

    def residual(x, delta):
        G = mesh.element_gradients(x)
        w, _ = weights(G, delta)
        r = np.zeros(nn)
        np.add.at(r, mesh.elements,
                  np.einsum("ed,evd->ev", w[:, None] * G, bg) * meas[:, None])
        r -= load(x)
        r[mesh.boundary_nodes] = 0.0
        return r

    def flux_jacobian(x, delta):
        G = mesh.element_gradients(x)
        w, wp = weights(G, delta)
        M = meas[:, None, None] * (w[:, None, None] * eye[None]
                                   + wp[:, None, None] * G[:, :, None] * G[:, None, :])
        ke = np.einsum("evd,edc,ewc->evw", bg, M, bg)
        J = np.zeros((nn, nn))
        np.add.at(J, (rows, cols), ke.ravel())
        return J

    def load_jacobian(x):
        # finite-difference columns; refreshed once per delta stage
        base = load(x)
        J = np.zeros((nn, nn))
        for j in idx:
            h = 1e-7 * (1.0 + abs(x[j]))
            xp = x.copy()
            xp[j] += h
            J[:, j] = (load(xp) - base) / h
        return J

    # the kink scale is the smallest positive element slope: smaller deltas
    # leave the |g|^{p-2} singularity unsmoothed (Newton creeps), much
    # larger ones wash out the saddle entirely
    gn0 = np.linalg.norm(mesh.element_gradients(x0), axis=1)
    pos = gn0[gn0 > 1e-9 * max(gn0.max(), 1.0)]
    d0 = max(1e-2, float(pos.min()) if pos.size else 1e-2)
    deltas = [d0 * 10.0 ** (-k) for k in range(13)] + [0.0]
    x = x0.copy()
    for delta in deltas:
        Jl = load_jacobian(x)
        for _ in range(30):
            r = residual(x, delta)
            rn = np.linalg.norm(r[idx])
            if np.abs(r[idx]).max() <= max(0.5 * cfg.eps_g, delta * 1e-3):
                break
            J = flux_jacobian(x, delta) - Jl
            try:
                dx = np.linalg.solve(J[np.ix_(idx, idx)], -r[idx])
            except np.linalg.LinAlgError:
                return x
            lam = 1.0
            improved = False
            for _ in range(40):
                xn = x.copy()
                xn[idx] += lam * dx
                if np.linalg.norm(residual(xn, delta)[idx]) < rn:
                    improved = True
                    break
                lam *= 0.5
            if not improved:
                break
            x = xn
    return x


def _polish_peak(P, mesh, cfg, path, kpk, energy, grad, I0, alpha, status):
    """Refine the peak state to a critical point (root of the residual)."""
    idx = mesh.interior_nodes
    x0 = path[kpk]

    # the relaxed path can slide down both valleys until the barrier
    # crossing hides inside a single segment; probe along the whole
    # polyline and start the polish from the highest sampled state
    cbest = energy(x0)
    ts = np.linspace(0.0, 1.0, 9, endpoint=False)[1:]
    for k in range(len(path) - 1):
        for t in ts:
            x = (1.0 - t) * path[k] + t * path[k + 1]
            c = energy(x)
            if c > cbest:
                x0, cbest = x, c

    def fun(xi):
        full = np.zeros(mesh.n_nodes)
        full[idx] = xi
        return grad(full)[idx]

    def try_root(xstart):
        try:
            if len(idx) <= 1500:
                sol = scipy.optimize.root(fun, xstart[idx], method="hybr",
                                          options={"xtol": 1e-13,
                                                   "maxfev": 200 * (len(idx) + 1)})
            else:
                sol = scipy.optimize.root(fun, xstart[idx], method="krylov",
                                          options={"fatol": 0.5 * cfg.eps_g,
                                                   "maxiter": 300, "disp": False})
            xi = sol.x
        except Exception:
            xi = xstart[idx]
        cand = np.zeros(mesh.n_nodes)
        cand[idx] = xi
        return cand

    # a candidate counts if it is a genuine critical point above the
    # mountain-pass floor (which excludes the zero well); of several the
    # lowest level wins, since higher saddles are admissible critical
    # points but not the minimax one.  Candidates above the floor that
    # miss the tolerance are kept as fallbacks by residual, so a failed
    # solve still reports the best state it found.
    admissible = []
    fallback = [(float(np.abs(grad(x0)).max()), x0)]

    def accept(cand):
        res = float(np.abs(grad(cand)).max())
        c_new = energy(cand)
        if c_new <= I0 + 0.5 * alpha:
            return
        if res <= cfg.eps_g:
            admissible.append((c_new, cand))
        else:
            fallback.append((res, cand))

    accept(try_root(x0))
    xp = _delta_newton(P, mesh, cfg, x0)
    accept(xp)
    if not admissible:
        accept(try_root(xp))
    if admissible:
        return min(admissible, key=lambda t: t[0])[1], "polished"

    # fall back to a climbing step loop along the path tangent
    x = x0.copy()
    lo = max(kpk - 1, 0)
    hi = min(kpk + 1, len(path) - 1)
    tau = path[hi] - path[lo]
    nt = np.linalg.norm(tau)
    if nt > 0:
        tau /= nt
    t = 1e-2
    g = grad(x)
    gn = np.linalg.norm(g)
    for _ in range(cfg.polish_iters):
        if float(np.abs(g).max()) <= cfg.eps_g:
            return x, "polished"
        d = -g + 2.0 * float(g @ tau) * tau
        accepted = False
        for _ in range(40):
            xn = x + t * d
            g_new = grad(xn)
            if np.linalg.norm(g_new) < gn:
                accepted = True
                break
            t *= 0.5
            if t < 1e-16:
                break
        if not accepted:
            break
        x = xn
        g = g_new
        gn = np.linalg.norm(g)
        t = min(t * 1.2, 1.0)
    fallback.append((float(np.abs(g).max()), x))
    return min(fallback, key=lambda t: t[0])[1], status


def _lambda_proxy(mesh, u: FeField, P: ProblemParams, g: np.ndarray) -> float:
    """Min-norm residual over admissible selections (slack on tie nodes only)."""
    r = g[mesh.interior_nodes].copy()
    ties = np.flatnonzero(u.values == P.beta)
    ties = ties[~mesh.boundary_mask[ties]]
    if len(ties) and P.beta > 0.0:
        lumped = np.zeros(mesh.n_nodes)
        np.add.at(lumped, mesh.elements,
                  np.broadcast_to(mesh.element_measures[:, None] / (mesh.dim + 1.0),
                                  mesh.elements.shape))
        width = P.beta ** (P.q - 1.0) * lumped[ties]
        pos = {n: i for i, n in enumerate(mesh.interior_nodes)}
        for n, wd in zip(ties, width):
            i = pos[n]
            # pointwise rule took the upper selection, so the admissible
            # residual range at a tie node is [r_i, r_i + wd]
            if r[i] <= 0.0 <= r[i] + wd:
                r[i] = 0.0
            elif r[i] < 0.0:
                r[i] = r[i] + wd
    return float(np.linalg.norm(r))


# -- brute-force oracle --------------------------------------------------------


def _batch_energy_1d(P: ProblemParams, mesh: Mesh, fields: np.ndarray) -> np.ndarray:
    """I for a batch of full nodal fields on a 1D mesh (vectorized)."""
    q, beta, p = P.q, P.beta, P.p
    els = mesh.elements
    h = mesh.element_measures
    a = fields[:, els[:, 0]]
    b = fields[:, els[:, 1]]
    gn = np.abs(b - a) / h
    Qp = (gn**p * h).sum(axis=1) / p

    fint = np.zeros_like(a)
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    const = np.abs(b - a) <= 1e-14 * scale
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    cmask = const & (0.5 * (a + b) > beta)
    if cmask.any():
        c = 0.5 * (a + b)[cmask]
        fint[cmask] = (c**q - beta**q) / q
    steep = ~const & (np.abs(b - a) > 0.05 * scale)
    smask = steep & (hi > beta)
    if smask.any():
        d = np.abs(b - a)[smask]
        t0 = np.maximum(lo[smask], beta)
        t1 = hi[smask]
        fint[smask] = ((t1 ** (q + 1.0) - t0 ** (q + 1.0)) / (q + 1.0)
                       - beta**q * (t1 - t0)) / (d * q)
    shallow = ~const & ~steep & (hi > beta)
    if shallow.any():
        from .quadrature import gauss_unit_interval

        x6, w6 = gauss_unit_interval(6)
        aw, bw = a[shallow], b[shallow]
        d = bw - aw
        s_cross = np.clip((beta - aw) / d, 0.0, 1.0)
        sa = np.where(d > 0.0, s_cross, 0.0)
        sb = np.where(d > 0.0, 1.0, s_cross)
        width = sb - sa
        s = sa[:, None] + width[:, None] * x6[None, :]
        u_s = aw[:, None] + d[:, None] * s
        fint[shallow] = width * (((u_s**q - beta**q) / q) @ w6)
    F = (fint * h).sum(axis=1)
    return Qp - F + (p - 1.0) / p * mesh.domain.measure


def _batch_energy(P: ProblemParams, mesh: Mesh, fields: np.ndarray) -> np.ndarray:
    if mesh.dim == 1:
        return _batch_energy_1d(P, mesh, fields)
    return np.array([eval_I(FeField(mesh, f, dirichlet=True), P).I for f in fields])


def _bottleneck(E: np.ndarray, start, goal):
    """Minimize the maximum of E along 8-neighbor grid paths start -> goal.

    Returns the optimal level and the argmax cell of one optimal path.
    """
    n0, n1 = E.shape
    best = np.full((n0, n1), np.inf)
    best[start] = float(E[start])
    parent = {start: None}
    heap = [(float(E[start]), start)]
    moves = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
    while heap:
        lvl, node = heapq.heappop(heap)
        if node == goal:
            cell = node
            peak = node
            while cell is not None:
                if E[cell] > E[peak]:
                    peak = cell
                cell = parent[cell]
            return float(lvl), peak
        if lvl > best[node]:
            continue
        i, j = node
        for di, dj in moves:
            ni, nj = i + di, j + dj
            if 0 <= ni < n0 and 0 <= nj < n1:
                nl = max(lvl, float(E[ni, nj]))
                if nl < best[ni, nj]:
                    best[ni, nj] = nl
                    parent[(ni, nj)] = node
                    heapq.heappush(heap, (nl, (ni, nj)))
    raise RuntimeError("bottleneck search failed to reach the endpoint")


def brute_saddle_oracle(P: ProblemParams, mesh: Mesh, e: FeField,
                        box: np.ndarray | None = None, grid: int = 201,
                        zooms: int = 4) -> float:
    """Exhaustive minimax level on meshes with at most two interior DOFs.

    One DOF: any path from 0 to e sweeps the segment, so the level is the
    segment maximum (grid plus bounded refinement).  Two DOFs: bottleneck
    shortest path (minimize the maximum energy along the path) on the
    8-neighbor grid graph over the coefficient box, then the energy grid
    is re-run on zoomed boxes around the bottleneck cell until the level
    stops moving.
    """
    idx = mesh.interior_nodes
    ndof = len(idx)
    if ndof == 0 or ndof > 2:
        raise ValueError("oracle needs a mesh with 1 or 2 interior DOFs")
    ecoef = e.values[idx]

    def batch(coeffs: np.ndarray) -> np.ndarray:
        fields = np.zeros((len(coeffs), mesh.n_nodes))
        for k, node in enumerate(idx):
            fields[:, node] = coeffs[:, k]
        return _batch_energy(P, mesh, fields)

    if ndof == 1:
        ts = np.linspace(0.0, 1.0, max(grid, 51))
        E = batch(ts[:, None] * ecoef[None, :])
        k = int(np.argmax(E))
        lo = ts[max(k - 1, 0)]
        hi = ts[min(k + 1, len(ts) - 1)]

        def neg(t):
            return -batch(np.array([[t * ecoef[0]]]))[0]

        r = scipy.optimize.minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                                           options={"xatol": 1e-13})
        return float(max(E[k], -r.fun))

    if box is None:
        span = np.maximum(np.abs(ecoef), 1.0)
        lo = np.minimum(0.0, ecoef) - 0.05 * span
        hi = np.maximum(0.0, ecoef) + 0.05 * span
        box = np.column_stack([lo, hi])
    box = np.asarray(box, dtype=float)

    def energy_grid(bx):
        ax0 = np.linspace(bx[0, 0], bx[0, 1], grid)
        ax1 = np.linspace(bx[1, 0], bx[1, 1], grid)
        X0, X1 = np.meshgrid(ax0, ax1, indexing="ij")
        E = batch(np.column_stack([X0.ravel(), X1.ravel()])).reshape(grid, grid)
        return ax0, ax1, E

    def nearest(ax0, ax1, pt):
        return (int(np.argmin(np.abs(ax0 - pt[0]))),
                int(np.argmin(np.abs(ax1 - pt[1]))))

    ax0, ax1, E = energy_grid(box)
    level, peak_cell = _bottleneck(E, nearest(ax0, ax1, np.zeros(2)),
                                   nearest(ax0, ax1, ecoef))
    peak = np.array([ax0[peak_cell[0]], ax1[peak_cell[1]]])
    step = np.array([ax0[1] - ax0[0], ax1[1] - ax1[0]])

    direction = ecoef / max(np.linalg.norm(ecoef), 1e-300)
    for _ in range(zooms):
        # zoomed pass across the saddle: anchor the search at the lowest
        # cells on either side of the saddle along the endpoint direction
        half = 4.0 * step
        bx = np.column_stack([peak - half, peak + half])
        ax0, ax1, E = energy_grid(bx)
        X0, X1 = np.meshgrid(ax0, ax1, indexing="ij")
        s = (X0 - peak[0]) * direction[0] + (X1 - peak[1]) * direction[1]
        cut = 0.25 * float(np.abs(s).max())
        lowA = np.where(s <= -cut, E, np.inf)
        lowB = np.where(s >= cut, E, np.inf)
        start = np.unravel_index(int(np.argmin(lowA)), E.shape)
        goal = np.unravel_index(int(np.argmin(lowB)), E.shape)
        level, peak_cell = _bottleneck(E, start, goal)
        peak = np.array([ax0[peak_cell[0]], ax1[peak_cell[1]]])
        step = np.array([ax0[1] - ax0[0], ax1[1] - ax1[0]])
    return float(level)
