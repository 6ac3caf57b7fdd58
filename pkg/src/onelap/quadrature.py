"""Quadrature rules and level-set clipping helpers.

Triangle rules are symmetric Gauss rules in barycentric coordinates with
weights normalized to sum to 1 (multiply by the element measure to
integrate).  The clipping helpers split a simplex by the level set of a
linear interpolant, which lets the threshold integrands be treated as
smooth on each piece.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "gauss_unit_interval",
    "triangle_rule",
    "clip_triangle_above",
    "triangle_fraction",
]


def gauss_unit_interval(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [0, 1]; weights sum to 1."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _perm3(a: float) -> np.ndarray:
    b = 1.0 - 2.0 * a
    return np.array([[b, a, a], [a, b, a], [a, a, b]])


# Symmetric triangle rules keyed by polynomial degree of exactness.
_TRI_RULES: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _build_tri_rules() -> None:
    c = np.array([[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]])
    _TRI_RULES[1] = (c, np.array([1.0]))
    _TRI_RULES[2] = (_perm3(1.0 / 6.0), np.full(3, 1.0 / 3.0))
    a1, w1 = 0.445948490915965, 0.223381589678011
    a2, w2 = 0.091576213509771, 0.109951743655322
    _TRI_RULES[4] = (
        np.vstack([_perm3(a1), _perm3(a2)]),
        np.concatenate([np.full(3, w1), np.full(3, w2)]),
    )
    a1, w1 = 0.470142064105115, 0.132394152788506
    a2, w2 = 0.101286507323456, 0.125939180544827
    _TRI_RULES[5] = (
        np.vstack([c, _perm3(a1), _perm3(a2)]),
        np.concatenate([[0.225], np.full(3, w1), np.full(3, w2)]),
    )


_build_tri_rules()


def triangle_rule(degree: int = 5) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric points (k, 3) and weights (k,) exact to `degree`."""
    if degree not in _TRI_RULES:
        degree = min(d for d in _TRI_RULES if d >= degree) if degree <= 5 else 5
    return _TRI_RULES[degree]


def clip_triangle_above(values: np.ndarray, level: float) -> list[np.ndarray]:
    """Split the region {u > level} of a triangle into sub-triangles.

    `values` are the three vertex values of the linear interpolant u.
    Returns a list of (3, 3) arrays whose rows are barycentric coordinates
    (w.r.t. the parent triangle) of sub-triangle vertices.  The union of
    the sub-triangles is the clipped polygon; it is empty when u <= level
    everywhere and the whole triangle when u > level everywhere.
    """
    v = np.asarray(values, dtype=float)
    above = v > level
    if above.all():
        return [np.eye(3)]
    if not above.any():
        return []
    corners = np.eye(3)
    poly: list[np.ndarray] = []
    for i in range(3):
        j = (i + 1) % 3
        if above[i]:
            poly.append(corners[i])
        if above[i] != above[j]:
            t = (level - v[i]) / (v[j] - v[i])
            poly.append(corners[i] + t * (corners[j] - corners[i]))
    return [np.stack([poly[0], poly[k], poly[k + 1]]) for k in range(1, len(poly) - 1)]


def triangle_fraction(bary_tri: np.ndarray) -> float:
    """Area of a barycentric sub-triangle as a fraction of the parent."""
    u = bary_tri[:, 1:]
    d1 = u[1] - u[0]
    d2 = u[2] - u[0]
    return abs(d1[0] * d2[1] - d1[1] * d2[0])
