import numpy as np
import pytest

from onelap.fields import FeField
from onelap.mesh import (Domain, boundary_trace_integral, build_interval_mesh,
                         build_rect_mesh, read_mesh, write_mesh)


def test_interval_mesh_basics():
    m = build_interval_mesh(2.0, 5)
    assert m.dim == 1
    assert m.n_nodes == 6
    assert m.n_elements == 5
    assert np.isclose(m.element_measures.sum(), 2.0)
    assert set(m.boundary_nodes) == {0, 5}
    # hat gradients on each element sum to zero
    assert np.allclose(m.basis_gradients.sum(axis=1), 0.0)


def test_rect_mesh_geometry():
    m = build_rect_mesh(1.5, 1.0, 6, 4)
    assert m.n_nodes == 7 * 5
    assert m.n_elements == 2 * 6 * 4
    assert np.isclose(m.element_measures.sum(), 1.5)
    assert np.allclose(np.linalg.norm(m.facet_normals, axis=1), 1.0)
    assert np.isclose(m.facet_measures.sum(), 2 * (1.5 + 1.0))
    assert np.allclose(m.basis_gradients.sum(axis=1), 0.0)


def test_rect_mesh_gradient_of_linear_field():
    m = build_rect_mesh(1.0, 2.0, 7, 5)
    vals = 3.0 * m.nodes[:, 0] - 0.5 * m.nodes[:, 1] + 1.0
    g = m.element_gradients(vals)
    assert np.allclose(g[:, 0], 3.0)
    assert np.allclose(g[:, 1], -0.5)


def test_domain_validation():
    with pytest.raises(ValueError):
        Domain(kind="interval", lengths=(-1.0,))
    with pytest.raises(ValueError):
        build_interval_mesh(1.0, 1)
    with pytest.raises(ValueError):
        build_rect_mesh(1.0, 1.0, 1, 4)


def test_boundary_trace_linear_1d():
    m = build_interval_mesh(1.0, 4)
    u = FeField(m, 2.0 * m.nodes[:, 0] - 0.5, dirichlet=False)
    # |u(0)| + |u(1)| = 0.5 + 1.5
    assert np.isclose(boundary_trace_integral(m, u), 2.0)


def test_boundary_trace_2d_against_quadrature():
    m = build_rect_mesh(1.0, 1.0, 4, 4)
    vals = m.nodes[:, 0] - 0.3
    u = FeField(m, vals, dirichlet=False)
    total = boundary_trace_integral(m, u)
    # integral of |x - 0.3| over the four unit-square sides
    import scipy.integrate as si

    side, _ = si.quad(lambda x: abs(x - 0.3), 0.0, 1.0)
    exact = 2 * side + 1.0 * abs(0.0 - 0.3) + 1.0 * abs(1.0 - 0.3)
    assert np.isclose(total, exact, rtol=1e-12)


def test_mesh_roundtrip(tmp_path):
    for m in (build_interval_mesh(1.0, 6), build_rect_mesh(1.0, 0.5, 3, 4)):
        path = tmp_path / "mesh.txt"
        write_mesh(m, path)
        m2 = read_mesh(path)
        assert np.array_equal(m.nodes, m2.nodes)
        assert np.array_equal(m.elements, m2.elements)
        assert np.array_equal(m.boundary_nodes, m2.boundary_nodes)


def test_arrays_are_write_locked():
    m = build_interval_mesh(1.0, 4)
    with pytest.raises(ValueError):
        m.nodes[0, 0] = 7.0
