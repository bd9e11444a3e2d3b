"""Rigid-body tessellations of a rectangular domain.

Four kinds are produced: clipped Voronoi, Voronoi with randomly shifted
vertices, "random" bodies grown from a Delaunay triangulation of auxiliary
vertices, and the latter with governing nodes moved to body centroids.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.spatial import Delaunay, QhullError, Voronoi, cKDTree

from .domain import DomainBox
from .points import place_points

log = logging.getLogger(__name__)

WELD_TOL = 1e-12
SNAP_TOL = 1e-9


class Kind(str, Enum):
    VORONOI = "voronoi"
    RANDOMIZED_VORONOI = "rand-voronoi"
    RANDOM = "random"
    CENTERED_RANDOM = "centered"


@dataclass(frozen=True, eq=False)
class Tessellation:
    """Governing nodes, shared vertices and per-node bodies.

    ``bodies[i]`` is a list of counter-clockwise vertex-id loops whose union
    is the rigid body of node ``i`` (one convex polygon for Voronoi kinds,
    a set of triangles for the random kinds).
    """

    domain: DomainBox
    nodes: np.ndarray
    vertices: np.ndarray
    bodies: list[list[np.ndarray]]
    kind: Kind
    seed: int | None = None
    l_min: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.vertices.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def body_areas(self) -> np.ndarray:
        return np.array([sum(polygon_area(self.vertices[p]) for p in polys) for polys in self.bodies])

    def body_centroids(self) -> np.ndarray:
        out = np.empty((self.n_nodes, 2))
        for i, polys in enumerate(self.bodies):
            areas = np.array([polygon_area(self.vertices[p]) for p in polys])
            cents = np.array([polygon_centroid(self.vertices[p]) for p in polys])
            out[i] = (areas[:, None] * cents).sum(0) / areas.sum()
        return out

    def boundary_nodes(self, tol: float | None = None) -> np.ndarray:
        """Nodes whose body has a vertex on the domain boundary."""
        tol = SNAP_TOL * self.l_min if tol is None else tol
        on_bnd = self.domain.distance_to_boundary(self.vertices) <= tol
        return np.array([i for i, polys in enumerate(self.bodies)
                         if any(on_bnd[p].any() for p in polys)], dtype=np.int64)


def polygon_area(xy: np.ndarray) -> float:
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_centroid(xy: np.ndarray) -> np.ndarray:
    x, y = xy[:, 0], xy[:, 1]
    x1, y1 = np.roll(x, -1), np.roll(y, -1)
    cross = x * y1 - x1 * y
    a = cross.sum() / 2.0
    return np.array([((x + x1) * cross).sum(), ((y + y1) * cross).sum()]) / (6.0 * a)


def _weld(vertices: np.ndarray, loops: list[list[np.ndarray]], tol: float):
    """Merge vertices closer than ``tol``, drop degenerate loop entries, reindex."""
    parent = np.arange(len(vertices))
    pairs = cKDTree(vertices).query_pairs(tol, output_type="ndarray") if tol > 0 else np.empty((0, 2), int)
    if len(pairs):
        log.warning("welding %d near-coincident vertex pairs (zero-length edges dropped)", len(pairs))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    root = np.array([find(i) for i in range(len(vertices))])
    used = np.unique(np.concatenate([np.concatenate(polys) for polys in loops]).astype(np.int64))
    used = np.unique(root[used])
    remap = np.full(len(vertices), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    out = []
    for polys in loops:
        body = []
        for p in polys:
            q = remap[root[p]]
            keep = q != np.roll(q, 1)
            q = q[keep]
            if len(q) >= 3:
                body.append(q)
        out.append(body)
    return vertices[used], out


def _ccw(loop: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    return loop if polygon_area(vertices[loop]) > 0 else loop[::-1]


def voronoi_tessellate(points: np.ndarray, domain: DomainBox, *, l_min: float = 1.0,
                       seed: int | None = None) -> Tessellation:
    """Voronoi diagram of ``points`` clipped to ``domain``.

    The clip is exact: points are mirrored across the four sides, so each
    side is the bisector between a point and its image and every cell of an
    original point is bounded and ends on the box.
    """
    domain.validate()
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ValueError("need at least 3 two-dimensional points")
    if not domain.contains(pts).all():
        raise ValueError("all points must lie inside the domain")
    lo, hi = np.asarray(domain.min_corner), np.asarray(domain.max_corner)
    images = [pts]
    for axis in (0, 1):
        for side in (lo, hi):
            m = pts.copy()
            m[:, axis] = 2.0 * side[axis] - m[:, axis]
            images.append(m)
    try:
        vor = Voronoi(np.concatenate(images))
    except QhullError as exc:
        raise ValueError(f"degenerate point set (collinear or duplicate points?): {exc}") from exc
    verts = vor.vertices.copy()
    loops = []
    for i in range(len(pts)):
        region = vor.regions[vor.point_region[i]]
        if -1 in region or len(region) < 3:
            raise ValueError(f"unbounded or degenerate Voronoi cell for point {i}")
        loops.append([np.asarray(region, dtype=np.int64)])
    # snap vertices lying on (or a rounding error outside) the box sides
    tol = SNAP_TOL * l_min
    for axis in (0, 1):
        for side in (lo[axis], hi[axis]):
            near = np.abs(verts[:, axis] - side) <= tol
            verts[near, axis] = side
    verts, loops = _weld(verts, loops, WELD_TOL * l_min)
    loops = [[_ccw(p, verts) for p in polys] for polys in loops]
    return Tessellation(domain, pts.copy(), verts, loops, Kind.VORONOI, seed, l_min)


def generate_voronoi(domain: DomainBox, l_min: float, seed: int, max_trials: int = 10_000) -> Tessellation:
    pts = place_points(domain, l_min, seed, max_trials)
    return voronoi_tessellate(pts, domain, l_min=l_min, seed=seed)


def randomize_vertices(t: Tessellation, seed: int | None = None, scale: float = 1.0) -> Tessellation:
    """Shift every Voronoi vertex by a random distance in a random direction.

    The distance is uniform on ``(0, k)`` with ``k`` half the distance to
    the nearest other vertex (times ``scale``; ``scale=0`` is the identity).
    Corner vertices stay fixed, vertices on a side slide along it by the
    projected shift, and interior vertices are not moved across the box.
    """
    if t.kind is not Kind.VORONOI:
        raise ValueError("randomize_vertices expects a Voronoi tessellation")
    seed = t.seed if seed is None else seed
    rng = np.random.default_rng([0 if seed is None else seed, 2])
    verts = np.array(t.vertices)
    dist, _ = cKDTree(verts).query(verts, 2)
    k = 0.5 * dist[:, 1] * scale
    r = rng.uniform(0.0, 1.0, len(verts)) * k
    phi = rng.uniform(0.0, 2.0 * np.pi, len(verts))
    shift = r[:, None] * np.stack([np.cos(phi), np.sin(phi)], -1)
    lo, hi = np.asarray(t.domain.min_corner), np.asarray(t.domain.max_corner)
    tol = SNAP_TOL * t.l_min
    on_side = np.stack([(np.abs(verts[:, a] - lo[a]) <= tol) | (np.abs(verts[:, a] - hi[a]) <= tol)
                        for a in (0, 1)], -1)
    shift[on_side] = 0.0  # slide along a side; corners (both flags) stay fixed
    interior = ~on_side.any(1)
    room = t.domain.distance_to_boundary(verts)
    over = interior & (np.hypot(*shift.T) >= room)
    if over.any():
        shift[over] *= (0.5 * room[over] / np.hypot(*shift[over].T))[:, None]
    new = verts + shift
    new = np.clip(new, lo, hi)
    return replace(t, vertices=new, kind=Kind.RANDOMIZED_VORONOI, seed=seed,
                   meta={**t.meta, "clamped_vertices": int(over.sum())})


def _perimeter_points(domain: DomainBox, spacing: float) -> np.ndarray:
    (x0, y0), (x1, y1) = domain.min_corner, domain.max_corner
    out = []
    for (ax, ay), (bx, by) in (((x0, y0), (x1, y0)), ((x1, y0), (x1, y1)),
                               ((x1, y1), (x0, y1)), ((x0, y1), (x0, y0))):
        # at least ``spacing`` apart so the rim obeys the same minimum distance as the interior
        n = max(1, int(np.floor(np.hypot(bx - ax, by - ay) / spacing + 1e-9)))
        s = np.arange(n) / n
        out.append(np.stack([ax + s * (bx - ax), ay + s * (by - ay)], -1))
    return np.concatenate(out)


def _cross(u: np.ndarray, v: np.ndarray):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _containing_triangle(tri: Delaunay, p: np.ndarray) -> int:
    """Lowest-id triangle containing ``p`` (closed triangles, orientation tests)."""
    s = int(tri.find_simplex(p))
    if s < 0:
        return s
    cands = [s] + [int(x) for x in tri.neighbors[s] if x >= 0]
    inside = []
    for c in cands:
        a, b, d = tri.points[tri.simplices[c]]
        o = [_cross(b - a, p - a), _cross(d - b, p - b), _cross(a - d, p - d)]
        area = _cross(b - a, d - a)
        if all(v * area >= 0 for v in o):
            inside.append(c)
    return min(inside) if inside else s


def generate_random(domain: DomainBox, l_min: float, seed: int, max_trials: int = 10_000) -> Tessellation:
    """Bodies grown from a Delaunay triangulation of auxiliary vertices.

    Basic nodes (spacing ``l_min``) claim the triangles that contain them;
    remaining triangles repeatedly join an already assigned neighbour,
    sweeping in ascending triangle id until nothing changes.
    """
    domain.validate()
    nodes = place_points(domain, l_min, seed, max_trials)
    rim = _perimeter_points(domain, 0.5 * l_min)
    verts = place_points(domain, 0.5 * l_min, np.random.default_rng([seed, 1]), max_trials, initial=rim)
    tri = Delaunay(verts)
    simplices = tri.simplices.astype(np.int64)
    a, b, c = (verts[simplices[:, i]] for i in range(3))
    flip = _cross(b - a, c - a) < 0
    simplices[flip] = simplices[flip][:, ::-1]

    owner = np.full(len(simplices), -1, dtype=np.int64)
    claims: dict[int, list[int]] = {}
    for i, p in enumerate(nodes):
        s = _containing_triangle(tri, p)
        if s < 0:
            raise ValueError(f"basic node {i} outside the triangulation")
        claims.setdefault(s, []).append(i)
    dropped = []
    centroids = verts[simplices].mean(1)
    for s, ids in claims.items():
        if len(ids) > 1:
            ids = sorted(ids, key=lambda i: (np.hypot(*(nodes[i] - centroids[s])), i))
            dropped.extend(ids[1:])
        owner[s] = ids[0]
    if dropped:
        log.warning("%d basic nodes share a triangle with another node and were dropped", len(dropped))

    neighbors = tri.neighbors
    changed = True
    while changed:
        changed = False
        for s in np.flatnonzero(owner < 0).tolist():
            nb = [int(x) for x in neighbors[s] if x >= 0 and owner[x] >= 0]
            if nb:
                owner[s] = owner[min(nb)]
                changed = True
    orphan = np.flatnonzero(owner < 0)
    if len(orphan):
        log.warning("%d triangles unreachable from any node; assigned by nearest node", len(orphan))
        keep = np.setdiff1d(np.arange(len(nodes)), dropped)
        _, j = cKDTree(nodes[keep]).query(centroids[orphan])
        owner[orphan] = keep[j]

    keep = np.setdiff1d(np.arange(len(nodes)), dropped)
    renum = np.full(len(nodes), -1, dtype=np.int64)
    renum[keep] = np.arange(len(keep))
    owner = renum[owner]
    order = np.argsort(owner, kind="stable")
    splits = np.searchsorted(owner[order], np.arange(1, len(keep)))
    bodies = [[simplices[s] for s in grp] for grp in np.split(order, splits)]
    t = Tessellation(domain, nodes[keep].copy(), verts, bodies, Kind.RANDOM, seed, l_min,
                     meta={"dropped_nodes": len(dropped), "orphan_triangles": int(len(orphan))})
    return t


def center_nodes(t: Tessellation) -> Tessellation:
    """Move each governing node to the area centroid of its body."""
    if t.kind is not Kind.RANDOM:
        raise ValueError("center_nodes expects a random tessellation")
    nodes = t.body_centroids()
    outside = sum(not _in_triangles(x, t.vertices, tris) for x, tris in zip(nodes, t.bodies))
    return replace(t, nodes=nodes, kind=Kind.CENTERED_RANDOM, meta={**t.meta, "nodes_outside_body": int(outside)})


def _in_triangles(p: np.ndarray, verts: np.ndarray, tris) -> bool:
    """Whether ``p`` lies in any of the counter-clockwise triangles (boundary included)."""
    tri = verts[np.asarray(tris)]
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    tol = -1e-12 * float(np.abs(tri).max(initial=1.0))
    return bool(((_cross(b - a, p - a) >= tol) & (_cross(c - b, p - b) >= tol) & (_cross(a - c, p - c) >= tol)).any())


def generate(kind: Kind | str, domain: DomainBox, l_min: float, seed: int, max_trials: int = 10_000) -> Tessellation:
    kind = Kind(kind)
    if kind in (Kind.VORONOI, Kind.RANDOMIZED_VORONOI):
        t = generate_voronoi(domain, l_min, seed, max_trials)
        return randomize_vertices(t, seed) if kind is Kind.RANDOMIZED_VORONOI else t
    t = generate_random(domain, l_min, seed, max_trials)
    return center_nodes(t) if kind is Kind.CENTERED_RANDOM else t
