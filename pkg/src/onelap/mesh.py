"""Conforming P1 meshes of intervals and axis-aligned rectangles.

Meshes carry exact element measures, the constant gradients of the nodal
hat functions on each element, and a tagged boundary (nodes plus facets
with outward unit normals).  In 1D the boundary "measure" is the counting
measure on the two endpoints.  Meshes are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Domain",
    "Mesh",
    "MeshError",
    "build_interval_mesh",
    "build_rect_mesh",
    "boundary_trace_integral",
    "write_mesh",
    "read_mesh",
]


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class Domain:
    """The computational domain: an interval [0, L] or rectangle [0, Lx] x [0, Ly]."""

    kind: str
    lengths: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("interval", "rectangle"):
            raise MeshError(f"unknown domain kind {self.kind!r}")
        want = 1 if self.kind == "interval" else 2
        if len(self.lengths) != want:
            raise MeshError(f"{self.kind} domain needs {want} length(s)")
        if any(L <= 0.0 for L in self.lengths):
            raise MeshError("domain lengths must be strictly positive")

    @property
    def dim(self) -> int:
        return len(self.lengths)

    @property
    def measure(self) -> float:
        out = 1.0
        for L in self.lengths:
            out *= L
        return out


class Mesh:
    """Immutable P1 simplicial mesh with boundary tagging.

    Attributes
    ----------
    nodes : (n_nodes, dim) float array of coordinates
    elements : (n_elements, dim + 1) int array of node indices
    element_measures : (n_elements,) measures |T|
    basis_gradients : (n_elements, dim + 1, dim) constant hat gradients
    boundary_nodes : sorted int array
    facet_nodes : (n_facets, dim) node indices of each boundary facet
    facet_normals : (n_facets, dim) outward unit normals
    facet_measures : (n_facets,) facet measures (1.0 for 1D endpoints)
    facet_elements : (n_facets,) index of the adjacent element
    """

    def __init__(self, domain, nodes, elements, boundary_nodes,
                 facet_nodes, facet_normals, facet_measures, facet_elements):
        self.domain = domain
        self.nodes = np.ascontiguousarray(nodes, dtype=float)
        self.elements = np.ascontiguousarray(elements, dtype=np.int64)
        self.boundary_nodes = np.sort(np.asarray(boundary_nodes, dtype=np.int64))
        self.facet_nodes = np.ascontiguousarray(facet_nodes, dtype=np.int64)
        self.facet_normals = np.ascontiguousarray(facet_normals, dtype=float)
        self.facet_measures = np.ascontiguousarray(facet_measures, dtype=float)
        self.facet_elements = np.ascontiguousarray(facet_elements, dtype=np.int64)
        self.element_measures, self.basis_gradients = self._geometry()
        mask = np.zeros(self.n_nodes, dtype=bool)
        mask[self.boundary_nodes] = True
        self.boundary_mask = mask
        self.interior_nodes = np.flatnonzero(~mask)
        for a in (self.nodes, self.elements, self.element_measures,
                  self.basis_gradients, self.boundary_nodes, self.facet_nodes,
                  self.facet_normals, self.facet_measures, self.facet_elements):
            a.setflags(write=False)
        self._check()

    # -- construction helpers -------------------------------------------------

    def _geometry(self) -> tuple[np.ndarray, np.ndarray]:
        pts = self.nodes[self.elements]          # (nel, dim+1, dim)
        if self.dim == 1:
            h = pts[:, 1, 0] - pts[:, 0, 0]
            measures = np.abs(h)
            grads = np.empty((len(h), 2, 1))
            grads[:, 0, 0] = -1.0 / h
            grads[:, 1, 0] = 1.0 / h
            return measures, grads
        e1 = pts[:, 1] - pts[:, 0]
        e2 = pts[:, 2] - pts[:, 0]
        det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        measures = 0.5 * np.abs(det)
        # grad(lambda_k) rows of the inverse Jacobian transpose
        grads = np.empty((len(det), 3, 2))
        grads[:, 1, 0] = e2[:, 1] / det
        grads[:, 1, 1] = -e2[:, 0] / det
        grads[:, 2, 0] = -e1[:, 1] / det
        grads[:, 2, 1] = e1[:, 0] / det
        grads[:, 0] = -grads[:, 1] - grads[:, 2]
        return measures, grads

    def _check(self) -> None:
        if (self.element_measures <= 0.0).any():
            raise MeshError("degenerate element with nonpositive measure")
        total = float(self.element_measures.sum())
        if abs(total - self.domain.measure) > 1e-12 * self.domain.measure:
            raise MeshError("element measures do not partition the domain")
        psum = np.abs(self.basis_gradients.sum(axis=1)).max()
        if psum > 1e-12:
            raise MeshError("basis gradients do not sum to zero")
        nrm = np.linalg.norm(self.facet_normals, axis=1)
        if np.abs(nrm - 1.0).max() > 1e-12:
            raise MeshError("boundary facet normal is not unit length")

    # -- queries ---------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    def element_gradients(self, values: np.ndarray) -> np.ndarray:
        """Constant per-element gradient of the P1 field with nodal `values`."""
        return np.einsum("evd,ev->ed", self.basis_gradients, values[self.elements])


def build_interval_mesh(L: float, n: int) -> Mesh:
    """Uniform mesh of [0, L] with n elements; endpoints are the boundary."""
    if n < 2:
        raise MeshError("interval mesh needs n >= 2 (no interior node otherwise)")
    domain = Domain("interval", (float(L),))
    nodes = np.linspace(0.0, L, n + 1)[:, None]
    elements = np.column_stack([np.arange(n), np.arange(1, n + 1)])
    facet_nodes = np.array([[0], [n]])
    facet_normals = np.array([[-1.0], [1.0]])
    facet_measures = np.array([1.0, 1.0])
    facet_elements = np.array([0, n - 1])
    return Mesh(domain, nodes, elements, [0, n],
                facet_nodes, facet_normals, facet_measures, facet_elements)


def build_rect_mesh(Lx: float, Ly: float, nx: int, ny: int) -> Mesh:
    """Structured triangulation of [0, Lx] x [0, Ly].

    Each of the nx*ny cells is split along the lower-left to upper-right
    diagonal, giving 2*nx*ny congruent right triangles.
    """
    if nx < 2 or ny < 2:
        raise MeshError("rectangle mesh needs nx, ny >= 2")
    domain = Domain("rectangle", (float(Lx), float(Ly)))
    xs = np.linspace(0.0, Lx, nx + 1)
    ys = np.linspace(0.0, Ly, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    def nid(i: int | np.ndarray, j: int | np.ndarray):
        return j * (nx + 1) + i

    I, J = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
    I, J = I.ravel(), J.ravel()
    a = nid(I, J)
    b = nid(I + 1, J)
    c = nid(I + 1, J + 1)
    d = nid(I, J + 1)
    lower = np.column_stack([a, b, c])
    upper = np.column_stack([a, c, d])
    elements = np.empty((2 * nx * ny, 3), dtype=np.int64)
    elements[0::2] = lower
    elements[1::2] = upper

    def cell(i, j):
        return 2 * (j * nx + i)

    fn, fm, fe, fv = [], [], [], []
    for i in range(nx):                       # bottom, normal (0, -1)
        fn.append([nid(i, 0), nid(i + 1, 0)])
        fm.append([0.0, -1.0])
        fe.append(cell(i, 0))
        fv.append(xs[i + 1] - xs[i])
    for j in range(ny):                       # right, normal (1, 0)
        fn.append([nid(nx, j), nid(nx, j + 1)])
        fm.append([1.0, 0.0])
        fe.append(cell(nx - 1, j))
        fv.append(ys[j + 1] - ys[j])
    for i in range(nx):                       # top, normal (0, 1)
        fn.append([nid(i, ny), nid(i + 1, ny)])
        fm.append([0.0, 1.0])
        fe.append(cell(i, ny - 1) + 1)
        fv.append(xs[i + 1] - xs[i])
    for j in range(ny):                       # left, normal (-1, 0)
        fn.append([nid(0, j), nid(0, j + 1)])
        fm.append([-1.0, 0.0])
        fe.append(cell(0, j) + 1)
        fv.append(ys[j + 1] - ys[j])

    boundary = np.unique(np.asarray(fn).ravel())
    return Mesh(domain, nodes, elements, boundary,
                np.asarray(fn), np.asarray(fm), np.asarray(fv), np.asarray(fe))


def boundary_trace_integral(mesh: Mesh, u) -> float:
    """Integral of |u| over the boundary of the piecewise-linear trace.

    1D uses the counting measure on the endpoints; 2D integrates the
    absolute value of the linear edge trace exactly.
    """
    values = np.asarray(getattr(u, "values", u), dtype=float)
    if mesh.dim == 1:
        i0, i1 = mesh.facet_nodes[:, 0]
        return abs(values[i0]) + abs(values[i1])
    va = values[mesh.facet_nodes[:, 0]]
    vb = values[mesh.facet_nodes[:, 1]]
    ell = mesh.facet_measures
    same = va * vb >= 0.0
    out = np.where(
        same,
        0.5 * (np.abs(va) + np.abs(vb)),
        0.5 * (va * va + vb * vb) / np.maximum(np.abs(va - vb), 1e-300),
    )
    return float((out * ell).sum())


def write_mesh(mesh: Mesh, path) -> None:
    """Plain-text node/element export (one node or element per line)."""
    with open(path, "w") as fh:
        fh.write("# onelap mesh v1\n")
        fh.write(f"domain {mesh.domain.kind} "
                 + " ".join("%.17g" % L for L in mesh.domain.lengths) + "\n")
        fh.write(f"nodes {mesh.n_nodes}\n")
        for row in mesh.nodes:
            fh.write(" ".join("%.17g" % x for x in row) + "\n")
        fh.write(f"elements {mesh.n_elements}\n")
        for row in mesh.elements:
            fh.write(" ".join(str(i) for i in row) + "\n")


def read_mesh(path) -> Mesh:
    """Rebuild a mesh written by `write_mesh`.

    Only structured meshes produced by the two builders are supported; the
    boundary data is regenerated from the domain record.
    """
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    head = lines[0].split()
    if head[0] != "domain":
        raise MeshError("missing domain record")
    kind = head[1]
    lengths = tuple(float(x) for x in head[2:])
    n_nodes = int(lines[1].split()[1])
    nodes = np.array([[float(x) for x in lines[2 + k].split()]
                      for k in range(n_nodes)])
    off = 2 + n_nodes
    n_el = int(lines[off].split()[1])
    if kind == "interval":
        mesh = build_interval_mesh(lengths[0], n_el)
    else:
        # node grid is (nx+1)*(ny+1); recover nx from the first row of nodes
        nx = int(np.sum(nodes[:, 1] == nodes[0, 1])) - 1
        ny = (n_nodes // (nx + 1)) - 1
        mesh = build_rect_mesh(lengths[0], lengths[1], nx, ny)
    if mesh.n_nodes != n_nodes or mesh.n_elements != n_el:
        raise MeshError("mesh file does not match a structured builder mesh")
    if np.abs(mesh.nodes - nodes).max() > 1e-12:
        raise MeshError("node coordinates do not match the structured layout")
    return mesh
