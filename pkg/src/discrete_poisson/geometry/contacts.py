"""Contact elements between neighbouring bodies and their angle statistics."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .tessellation import Tessellation

log = logging.getLogger(__name__)

COLLINEAR_TOL = 1e-9


@dataclass(frozen=True)
class ContactElement:
    a: int
    b: int
    A: float
    l: float
    n: np.ndarray
    t: np.ndarray
    c: np.ndarray
    chi: float
    face: tuple[int, int]

    @property
    def volume(self) -> float:
        return float(np.cos(self.chi) * self.A * self.l / 2.0)


@dataclass(frozen=True, eq=False)
class Contacts:
    """Structure-of-arrays container of all contact elements of a tessellation.

    ``n`` points out of body ``a`` (``a < b``), ``t = (x_b - x_a) / l`` and
    ``chi`` is the signed angle from ``n`` to ``t``. The ``boundary_*``
    arrays describe faces on the domain boundary, which carry no element.
    """

    a: np.ndarray
    b: np.ndarray
    A: np.ndarray
    l: np.ndarray
    n: np.ndarray
    t: np.ndarray
    c: np.ndarray
    chi: np.ndarray
    face: np.ndarray
    boundary_owner: np.ndarray
    boundary_A: np.ndarray
    boundary_n: np.ndarray
    boundary_c: np.ndarray

    def __len__(self) -> int:
        return len(self.a)

    def __getitem__(self, i: int) -> ContactElement:
        return ContactElement(int(self.a[i]), int(self.b[i]), float(self.A[i]), float(self.l[i]),
                              self.n[i], self.t[i], self.c[i], float(self.chi[i]),
                              (int(self.face[i, 0]), int(self.face[i, 1])))

    @property
    def volumes(self) -> np.ndarray:
        return np.cos(self.chi) * self.A * self.l / 2.0

    def boundary_volumes(self, nodes: np.ndarray) -> np.ndarray:
        """Fan areas between boundary faces and the governing node of their body."""
        arm = self.boundary_c - nodes[self.boundary_owner]
        return 0.5 * self.boundary_A * np.einsum("ij,ij->i", self.boundary_n, arm)

    def pair_multiplicity(self) -> np.ndarray:
        """Number of elements per connected body pair."""
        _, counts = np.unique(np.stack([self.a, self.b], 1), axis=0, return_counts=True)
        return counts


def _directed_edges(t: Tessellation):
    src, dst, own = [], [], []
    for i, polys in enumerate(t.bodies):
        for p in polys:
            src.append(p)
            dst.append(np.roll(p, -1))
            own.append(np.full(len(p), i, dtype=np.int64))
    return np.concatenate(src), np.concatenate(dst), np.concatenate(own)


def _merge_runs(edges: list[tuple[int, int]], verts: np.ndarray) -> list[list[tuple[int, int]]]:
    """Group directed edges of one body pair into maximal collinear chains."""
    by_start = {u: (u, v) for u, v in edges}
    ends = {v for _, v in edges}
    runs, seen = [], set()

    def collinear(e1, e2):
        d1 = verts[e1[1]] - verts[e1[0]]
        d2 = verts[e2[1]] - verts[e2[0]]
        cross = d1[0] * d2[1] - d1[1] * d2[0]
        return abs(cross) <= COLLINEAR_TOL * np.hypot(*d1) * np.hypot(*d2) and np.dot(d1, d2) > 0

    # chains start at edges whose predecessor is absent or bends away
    pred = {v: (u, v) for u, v in edges}
    for e in sorted(edges):
        p = pred.get(e[0])
        if p is not None and e[0] in ends and collinear(p, e):
            continue
        run = [e]
        seen.add(e)
        nxt = by_start.get(e[1])
        while nxt is not None and nxt not in seen and collinear(run[-1], nxt):
            run.append(nxt)
            seen.add(nxt)
            nxt = by_start.get(nxt[1])
        runs.append(run)
    for e in sorted(set(edges) - seen):  # closed collinear loops cannot occur; keep anything left
        runs.append([e])
    return runs


def extract_contacts(t: Tessellation, nodes: np.ndarray | None = None) -> Contacts:
    """One contact element per maximal straight face run shared by two bodies."""
    nodes = t.nodes if nodes is None else np.asarray(nodes, dtype=float)
    verts = t.vertices
    src, dst, own = _directed_edges(t)
    length = np.hypot(*(verts[dst] - verts[src]).T)
    short = length < 1e-12 * t.l_min
    if short.any():
        log.warning("dropping %d zero-length edges", int(short.sum()))
        src, dst, own = src[~short], dst[~short], own[~short]
    m = len(verts)
    key = src * m + dst
    order = np.argsort(key)
    skey = key[order]
    twin_key = dst * m + src
    pos = np.searchsorted(skey, twin_key)
    pos = np.minimum(pos, len(skey) - 1)
    has_twin = skey[pos] == twin_key
    twin_owner = np.where(has_twin, own[order[pos]], -1)

    boundary = ~has_twin
    shared = has_twin & (twin_owner != own) & (own < twin_owner)
    if (has_twin & (twin_owner != own) & (own > twin_owner)).sum() != shared.sum():
        raise ValueError("inconsistent tessellation: shared faces do not pair up")

    # faces from body a's perspective, a < b
    fa, fb, fu, fv = own[shared], twin_owner[shared], src[shared], dst[shared]
    pair_key = fa * len(nodes) + fb
    porder = np.lexsort((fu, pair_key))
    fa, fb, fu, fv, pair_key = fa[porder], fb[porder], fu[porder], fv[porder], pair_key[porder]
    uniq, start, counts = np.unique(pair_key, return_index=True, return_counts=True)

    rows = []  # (a, b, u, v, A, cx, cy, nx, ny)
    single = counts == 1
    idx = start[single]
    p, q = verts[fu[idx]], verts[fv[idx]]
    d = q - p
    A = np.hypot(d[:, 0], d[:, 1])
    cent = 0.5 * (p + q)
    normal = np.stack([d[:, 1], -d[:, 0]], -1) / A[:, None]
    rows.append((fa[idx], fb[idx], fu[idx], fv[idx], A, cent, normal))

    multi = []
    for s, cnt in zip(start[~single], counts[~single]):
        sl = slice(s, s + cnt)
        edges = list(zip(fu[sl].tolist(), fv[sl].tolist()))
        for run in _merge_runs(edges, verts):
            seg = np.array([[verts[u], verts[v]] for u, v in run])
            lens = np.hypot(*(seg[:, 1] - seg[:, 0]).T)
            total = lens.sum()
            c = ((0.5 * (seg[:, 0] + seg[:, 1])) * lens[:, None]).sum(0) / total
            dd = verts[run[-1][1]] - verts[run[0][0]]
            nrm = np.array([dd[1], -dd[0]]) / np.hypot(*dd)
            multi.append((int(fa[s]), int(fb[s]), run[0][0], run[-1][1], total, c, nrm))
    if multi:
        cols = list(zip(*multi))
        rows.append((np.array(cols[0]), np.array(cols[1]), np.array(cols[2]), np.array(cols[3]),
                     np.array(cols[4]), np.array(cols[5]), np.array(cols[6])))
    a = np.concatenate([r[0] for r in rows]).astype(np.int64)
    b = np.concatenate([r[1] for r in rows]).astype(np.int64)
    face = np.stack([np.concatenate([r[2] for r in rows]), np.concatenate([r[3] for r in rows])], 1).astype(np.int64)
    A = np.concatenate([r[4] for r in rows])
    c = np.concatenate([r[5].reshape(-1, 2) for r in rows])
    n = np.concatenate([r[6].reshape(-1, 2) for r in rows])
    order = np.lexsort((face[:, 0], b, a))
    a, b, face, A, c, n = a[order], b[order], face[order], A[order], c[order], n[order]

    branch = nodes[b] - nodes[a]
    l = np.hypot(branch[:, 0], branch[:, 1])
    if np.any(l <= 1e-9 * t.l_min):
        raise ValueError("contact with (near) zero length between governing nodes")
    tv = branch / l[:, None]
    chi = np.arctan2(n[:, 0] * tv[:, 1] - n[:, 1] * tv[:, 0], np.einsum("ij,ij->i", n, tv))

    bu, bv, bo = src[boundary], dst[boundary], own[boundary]
    bd = verts[bv] - verts[bu]
    bA = np.hypot(bd[:, 0], bd[:, 1])
    on_edge = t.domain.distance_to_boundary(0.5 * (verts[bu] + verts[bv])) <= 1e-9 * t.l_min
    if not on_edge.all():
        raise ValueError(f"{int((~on_edge).sum())} unmatched faces inside the domain")
    bn = np.stack([bd[:, 1], -bd[:, 0]], -1) / bA[:, None]
    return Contacts(a, b, A, l, n, tv, c, chi, face, bo, bA, bn, 0.5 * (verts[bu] + verts[bv]))


@dataclass(frozen=True)
class ChiStatistics:
    edges: np.ndarray
    density: np.ndarray
    I1: float
    I2: float
    sample_count: int

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])


def chi_statistics(chi, bins: int = 80) -> ChiStatistics:
    """Empirical ``I1 = E[cos chi]``, ``I2 = E[cos 2chi]`` and a density histogram on ``[-pi, pi]``."""
    chi = np.asarray(getattr(chi, "chi", chi), dtype=float)
    if chi.size == 0:
        raise ValueError("no contact angles")
    density, edges = np.histogram(chi, bins=bins, range=(-np.pi, np.pi), density=True)
    return ChiStatistics(edges, density, float(np.cos(chi).mean()), float(np.cos(2 * chi).mean()), int(chi.size))
