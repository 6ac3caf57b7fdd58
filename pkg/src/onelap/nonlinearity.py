"""The Heaviside-threshold nonlinearity, its primitive and Clarke interval.

f(t) = H(t - beta) |t|^{q-2} t with H(0) = 1, so f jumps from 0 to
beta^{q-1} at t = beta.  All evaluations accept scalars or arrays and are
pure functions.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ProblemParams",
    "ClarkeInterval",
    "heaviside",
    "f_beta",
    "F_beta",
    "clarke_interval",
    "clarke_bounds",
]


@dataclass(frozen=True)
class ProblemParams:
    """Parameter tuple (dim, q, beta, p, p_bar).

    Requires 1 < q < dim/(dim-1) for dim >= 2 and 1 < q < 2 for the 1D
    model problem, plus 1 < p <= p_bar < q and beta >= 0.
    """

    dim: int
    q: float
    beta: float
    p: float
    p_bar: float

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        qmax = 2.0 if self.dim == 1 else self.dim / (self.dim - 1.0)
        if not 1.0 < self.q < qmax:
            raise ValueError(f"q must satisfy 1 < q < {qmax} for dim={self.dim}")
        if self.beta < 0.0:
            raise ValueError("beta must be >= 0")
        if not 1.0 < self.p <= self.p_bar:
            raise ValueError("p must satisfy 1 < p <= p_bar")
        if not self.p_bar < self.q:
            raise ValueError("p_bar must satisfy p_bar < q")

    @property
    def model_1d(self) -> bool:
        """True for the 1D model problem (the estimates assume dim >= 2)."""
        return self.dim == 1

    def with_(self, **kw) -> "ProblemParams":
        return dataclasses.replace(self, **kw)


@dataclass(frozen=True)
class ClarkeInterval:
    """Closed interval of admissible selection values at a point."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError("empty Clarke interval")

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= value <= self.hi + tol


def heaviside(t):
    """Heaviside step with the tie at 0 resolved to 1."""
    arr = np.asarray(t, dtype=float)
    out = np.where(arr >= 0.0, 1.0, 0.0)
    return float(out) if np.isscalar(t) or arr.ndim == 0 else out


def _power_term(t: np.ndarray, q: float) -> np.ndarray:
    # |t|^{q-2} t, with the removable 0^{q-1} handled explicitly
    out = np.zeros_like(t)
    nz = t != 0.0
    out[nz] = np.sign(t[nz]) * np.abs(t[nz]) ** (q - 1.0)
    return out


def f_beta(t, P: ProblemParams):
    """H(t - beta) |t|^{q-2} t."""
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    active = arr >= P.beta
    out = np.zeros_like(arr)
    out[active] = _power_term(arr[active], P.q)
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        return float(out[0])
    return out


def F_beta(t, P: ProblemParams):
    """Primitive of f_beta: 0 for t <= beta, (t^q - beta^q)/q above."""
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros_like(arr)
    above = arr > P.beta
    out[above] = (arr[above] ** P.q - P.beta ** P.q) / P.q
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        return float(out[0])
    return out


def clarke_bounds(t, P: ProblemParams):
    """Vectorized lower/upper envelopes of the Clarke interval at t."""
    arr = np.asarray(t, dtype=float)
    scalar = np.isscalar(t) or arr.ndim == 0
    arr = np.atleast_1d(arr)
    hi = np.zeros_like(arr)
    lo = np.zeros_like(arr)
    above = arr > P.beta
    tie = arr == P.beta
    hi[above] = _power_term(arr[above], P.q)
    lo[above] = hi[above]
    hi[tie] = P.beta ** (P.q - 1.0)
    if scalar:
        return float(lo[0]), float(hi[0])
    return lo, hi


def clarke_interval(t: float, P: ProblemParams) -> ClarkeInterval:
    """Clarke interval: {0} below beta, [0, beta^{q-1}] at beta, {t^{q-1}} above."""
    lo, hi = clarke_bounds(float(t), P)
    return ClarkeInterval(lo, hi)
