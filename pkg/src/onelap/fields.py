"""Discrete fields: P1 nodal fields, P0 flux fields, and selections.

A SelectionField records the selection rule together with the field it was
derived from, so that integrals against test functions can be evaluated by
pointwise composition (the same quadrature the solver uses) rather than by
re-interpolating nodal values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import Mesh
from .nonlinearity import ProblemParams, f_beta

__all__ = ["FeField", "FluxField", "SelectionField", "selection_rho"]


@dataclass
class FeField:
    """P1 field given by one value per mesh node.

    With `dirichlet=True` the boundary values are pinned to exactly 0.
    """

    mesh: Mesh
    values: np.ndarray
    dirichlet: bool = True

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.n_nodes,):
            raise ValueError("value list length must equal the node count")
        if self.dirichlet and len(self.mesh.boundary_nodes):
            if np.any(self.values[self.mesh.boundary_nodes] != 0.0):
                raise ValueError("dirichlet field has nonzero boundary values")

    @classmethod
    def zeros(cls, mesh: Mesh, dirichlet: bool = True) -> "FeField":
        return cls(mesh, np.zeros(mesh.n_nodes), dirichlet)

    @classmethod
    def from_function(cls, mesh: Mesh, fn, dirichlet: bool = False) -> "FeField":
        """Nodal interpolation of a callable of the coordinates."""
        vals = np.array([float(fn(x)) for x in mesh.nodes])
        if dirichlet:
            vals[mesh.boundary_nodes] = 0.0
        return cls(mesh, vals, dirichlet)

    def with_values(self, values: np.ndarray) -> "FeField":
        return FeField(self.mesh, values, self.dirichlet)

    def element_gradients(self) -> np.ndarray:
        return self.mesh.element_gradients(self.values)

    def scaled(self, t: float) -> "FeField":
        return FeField(self.mesh, t * self.values, self.dirichlet)


@dataclass
class FluxField:
    """Piecewise-constant vector field: one vector per element."""

    mesh: Mesh
    vectors: np.ndarray

    def __post_init__(self) -> None:
        self.vectors = np.asarray(self.vectors, dtype=float)
        if self.vectors.shape != (self.mesh.n_elements, self.mesh.dim):
            raise ValueError("flux shape must be (n_elements, dim)")

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=1)


@dataclass
class SelectionField:
    """Admissible selection rho inside the Clarke interval of u.

    `values` are the nodal values (used for export and the interval
    check); integrals are evaluated by composing the rule with u at
    quadrature points.
    """

    u: FeField
    params: ProblemParams
    rule: str
    values: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.rule not in ("pointwise", "lower", "upper"):
            raise ValueError(f"unknown selection rule {self.rule!r}")
        if self.values is None:
            self.values = self.evaluate(self.u.values)
        self.values = np.asarray(self.values, dtype=float)

    @property
    def mesh(self) -> Mesh:
        return self.u.mesh

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        """Selection value at field values t (pointwise composition)."""
        P = self.params
        out = f_beta(np.asarray(t, dtype=float), P)
        if self.rule == "lower":
            out = np.where(np.asarray(t) == P.beta, 0.0, out)
        # "upper" coincides with the pointwise rule: H(0) = 1
        return out


def selection_rho(u: FeField, P: ProblemParams, rule: str = "pointwise") -> SelectionField:
    """Selection field for u; the rule only matters on the tie set {u = beta}."""
    return SelectionField(u, P, rule)
