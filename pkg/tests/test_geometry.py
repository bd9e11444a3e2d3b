import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.distance import pdist

from discrete_poisson import io as tio
from discrete_poisson.geometry import (
    DomainBox,
    Kind,
    center_nodes,
    chi_statistics,
    extract_contacts,
    generate,
    place_points,
    randomize_vertices,
    voronoi_tessellate,
)
from discrete_poisson.geometry.tessellation import _in_triangles, polygon_area, polygon_centroid


class TestDomainBox:
    def test_basic_properties(self):
        box = DomainBox((1.0, 2.0), (4.0, 6.0))
        assert box.area == 12.0
        assert box.size == (3.0, 4.0)
        assert np.allclose(box.center, [2.5, 4.0])
        assert box.distance_to_boundary(np.array([2.0, 3.0])) == pytest.approx(1.0)
        assert box.shrink(1.0).area == pytest.approx(2.0)

    def test_degenerate(self):
        with pytest.raises(ValueError):
            DomainBox((0.0, 0.0), (0.0, 1.0)).validate()


class TestPointPlacement:
    @settings(max_examples=10, deadline=None)
    @given(seed=st.integers(0, 2**31), size=st.floats(3.0, 12.0))
    def test_minimum_distance_and_containment(self, seed, size):
        box = DomainBox.from_size(size, size * 0.7)
        pts = place_points(box, 1.0, seed, max_trials=500)
        assert box.contains(pts).all()
        if len(pts) > 1:
            assert pdist(pts).min() >= 1.0

    def test_deterministic(self):
        box = DomainBox.from_size(10.0, 10.0)
        assert np.array_equal(place_points(box, 1.0, 5), place_points(box, 1.0, 5))
        assert not np.array_equal(place_points(box, 1.0, 5), place_points(box, 1.0, 6))

    def test_saturation_increases_with_trials(self):
        box = DomainBox.from_size(20.0, 20.0)
        assert len(place_points(box, 1.0, 1, max_trials=10)) < len(place_points(box, 1.0, 1, max_trials=5000))

    def test_initial_points_first(self):
        box = DomainBox.from_size(5.0, 5.0)
        init = np.array([[0.0, 0.0], [5.0, 5.0]])
        pts = place_points(box, 1.0, 0, initial=init)
        assert np.array_equal(pts[:2], init)

    def test_invalid(self):
        with pytest.raises(ValueError):
            place_points(DomainBox.from_size(1, 1), 0.0)


def test_polygon_helpers():
    sq = np.array([[0, 0], [2, 0], [2, 1], [0, 1]], dtype=float)
    assert polygon_area(sq) == pytest.approx(2.0)
    assert polygon_area(sq[::-1]) == pytest.approx(-2.0)
    assert np.allclose(polygon_centroid(sq), [1.0, 0.5])


class TestTessellations:
    def test_partition_closure(self, structure):
        t, _ = structure
        areas = t.body_areas()
        assert np.all(areas > 0)
        assert areas.sum() == pytest.approx(t.domain.area, rel=1e-9)

    def test_volume_closure(self, structure):
        # element volumes plus boundary fans tile the domain
        t, c = structure
        total = c.volumes.sum() + c.boundary_volumes(t.nodes).sum()
        assert total == pytest.approx(t.domain.area, rel=1e-9)

    def test_vertices_inside_domain(self, structure):
        t, _ = structure
        assert t.domain.contains(t.vertices, tol=1e-12).all()

    def test_boundary_nodes_touch_boundary(self, structure):
        t, _ = structure
        bnd = t.boundary_nodes()
        assert 0 < len(bnd) < t.n_nodes
        d = t.domain.distance_to_boundary(t.vertices)
        for i in bnd[:20]:
            assert min(d[p].min() for p in t.bodies[i]) <= 1e-9

    def test_deterministic_serialization(self, small_box):
        for kind in ["rand-voronoi", "centered"]:
            a = generate(kind, small_box, 1.0, 3)
            b = generate(kind, small_box, 1.0, 3)
            assert tio.dumps(tio.tessellation_to_dict(a)) == tio.dumps(tio.tessellation_to_dict(b))

    def test_voronoi_nodes_are_nuclei(self, small_box):
        t = generate("voronoi", small_box, 1.0, 7)
        assert np.array_equal(t.nodes, place_points(small_box, 1.0, 7))

    def test_random_kind_shares_nuclei_with_voronoi(self, structures):
        v, _ = structures["voronoi"]
        r, _ = structures["random"]
        dropped = r.meta.get("dropped_nodes", 0)
        assert r.n_nodes == v.n_nodes - dropped

    def test_centered_nodes_are_centroids(self, structures):
        r, _ = structures["random"]
        c, _ = structures["centered"]
        assert np.allclose(c.nodes, r.body_centroids())
        assert np.array_equal(c.vertices, r.vertices)
        assert all(np.array_equal(p, q) for bp, bq in zip(r.bodies, c.bodies) for p, q in zip(bp, bq))

    def test_random_nodes_inside_own_body(self, structures):
        r, _ = structures["random"]
        assert all(_in_triangles(x, r.vertices, tris) for x, tris in zip(r.nodes, r.bodies))

    def test_centered_records_nodes_outside(self, structures):
        r, _ = structures["random"]
        c, _ = structures["centered"]
        expected = sum(not _in_triangles(x, r.vertices, tris) for x, tris in zip(c.nodes, r.bodies))
        assert c.meta["nodes_outside_body"] == expected

    def test_randomize_scale_zero_is_identity(self, structures):
        v, _ = structures["voronoi"]
        same = randomize_vertices(v, seed=1, scale=0.0)
        assert np.array_equal(same.vertices, v.vertices)

    def test_randomized_corners_fixed(self, structures):
        t, _ = structures["rand-voronoi"]
        corners = np.array([[0, 0], [15, 0], [0, 15], [15, 15]], dtype=float)
        for c in corners:
            assert np.min(np.hypot(*(t.vertices - c).T)) < 1e-12

    def test_kind_checks(self, structures):
        with pytest.raises(ValueError):
            randomize_vertices(structures["random"][0])
        with pytest.raises(ValueError):
            center_nodes(structures["voronoi"][0])

    def test_voronoi_needs_points(self):
        with pytest.raises(ValueError):
            voronoi_tessellate(np.zeros((1, 2)), DomainBox.from_size(1, 1))


class TestContacts:
    def test_element_invariants(self, structure):
        t, c = structure
        assert np.all(c.a < c.b)
        assert np.allclose(np.hypot(*c.n.T), 1.0)
        assert np.allclose(np.hypot(*c.t.T), 1.0)
        assert np.allclose(t.nodes[c.b] - t.nodes[c.a], c.l[:, None] * c.t)
        assert np.allclose(np.cos(c.chi), np.einsum("ij,ij->i", c.n, c.t))
        assert np.all(c.A > 0)

    def test_voronoi_kinds_have_positive_volumes(self, structures):
        for kind in ["voronoi", "rand-voronoi"]:
            assert np.all(np.abs(structures[kind][1].chi) < np.pi / 2)

    def test_non_convex_bodies_allow_obtuse_angles(self, structures):
        # random bodies are unions of triangles; some contact vectors point away from the face
        _, c = structures["random"]
        assert np.all(np.abs(c.chi) <= np.pi)

    def test_normal_points_out_of_a(self, structure):
        t, c = structure
        for i in range(0, len(c), max(1, len(c) // 150)):
            probe_out = c.c[i] + 1e-6 * c.n[i]
            probe_in = c.c[i] - 1e-6 * c.n[i]
            assert not any(_inside(t.vertices[p], probe_out) for p in t.bodies[c.a[i]])
            assert any(_inside(t.vertices[p], probe_in) for p in t.bodies[c.a[i]])
            assert any(_inside(t.vertices[p], probe_out) for p in t.bodies[c.b[i]])

    def test_voronoi_angles_and_lengths(self, structures):
        t, c = structures["voronoi"]
        assert np.abs(c.chi).max() < 1e-9
        # bisector: node-to-face distance is half the element length
        dist = np.abs(np.einsum("ij,ij->i", c.c - t.nodes[c.a], c.n))
        assert np.allclose(c.l, 2.0 * dist)

    def test_relabelling_keeps_cos_chi(self, structure):
        _, c = structure
        # swap a and b: n -> -n, t -> -t, so cos(chi) is unchanged
        assert np.allclose(np.einsum("ij,ij->i", -c.n, -c.t), np.cos(c.chi))

    def test_one_element_per_straight_run(self, structures):
        t, c = structures["random"]
        assert c.pair_multiplicity().max() >= 2  # some pairs touch along several straight runs
        # merged faces are straight: the face endpoints are at distance A
        for i in range(min(200, len(c))):
            u, v = c.face[i]
            assert np.hypot(*(t.vertices[v] - t.vertices[u])) == pytest.approx(c.A[i], rel=1e-9)

    def test_randomized_chi_symmetric(self, structures):
        _, c = structures["rand-voronoi"]
        s = np.sin(c.chi)
        assert abs(s.mean()) < 3 * s.std() / np.sqrt(len(s))

    def test_io_roundtrip(self, structure):
        t, c = structure
        t2, c2 = tio.tessellation_from_dict(tio.tessellation_to_dict(t, c))
        assert np.array_equal(t2.nodes, t.nodes)
        assert np.array_equal(c2.chi, c.chi)
        assert np.array_equal(extract_contacts(t2).n, c.n)


class TestChiStatistics:
    def test_parallel(self):
        st_ = chi_statistics(np.zeros(10))
        assert (st_.I1, st_.I2) == (1.0, 1.0)

    def test_perpendicular(self):
        st_ = chi_statistics(np.array([np.pi / 2, -np.pi / 2]))
        assert st_.I1 == pytest.approx(0.0, abs=1e-15)
        assert st_.I2 == pytest.approx(-1.0)

    def test_histogram_normalised(self, structures):
        st_ = chi_statistics(structures["random"][1], bins=40)
        assert len(st_.centers) == 40
        assert (st_.density * np.diff(st_.edges)).sum() == pytest.approx(1.0)

    def test_empty(self):
        with pytest.raises(ValueError):
            chi_statistics(np.array([]))

    def test_kind_ordering(self, structures):
        i2 = {k: chi_statistics(c).I2 for k, (_, c) in structures.items()}
        assert i2["voronoi"] == pytest.approx(1.0)
        assert i2["voronoi"] > i2["rand-voronoi"] > i2["centered"] > i2["random"]


def _inside(poly: np.ndarray, p: np.ndarray) -> bool:
    """Even-odd ray casting."""
    x, y = p
    inside = False
    for (x0, y0), (x1, y1) in zip(poly, np.roll(poly, -1, axis=0)):
        if (y0 > y) != (y1 > y) and x < x0 + (y - y0) * (x1 - x0) / (y1 - y0):
            inside = not inside
    return inside
