"""Sequential random placement of points with a minimum mutual distance."""
from __future__ import annotations

import math

import numpy as np

from .domain import DomainBox

BATCH = 1024


class _Grid:
    """Background grid with at most one accepted point per cell."""

    def __init__(self, domain: DomainBox, spacing: float):
        self.origin = np.asarray(domain.min_corner, dtype=float)
        self.h = spacing / math.sqrt(2.0)
        self.shape = tuple(int(math.ceil(s / self.h)) + 1 for s in domain.size)
        # padded by the search reach so neighbour lookups never leave the array
        self.reach = 2
        r = self.reach
        self.cells = np.full((self.shape[0] + 2 * r, self.shape[1] + 2 * r), -1, dtype=np.int64)
        self.spacing2 = spacing * spacing
        self.pts = np.zeros((1024, 2))
        self.count = 0
        offs = np.arange(-r, r + 1)
        self.offsets = np.stack(np.meshgrid(offs, offs, indexing="ij"), -1).reshape(-1, 2)

    def _cells(self, p: np.ndarray) -> np.ndarray:
        ij = np.floor((p - self.origin) / self.h).astype(np.int64)
        return np.clip(ij, 0, np.array(self.shape) - 1) + self.reach

    def add(self, p) -> None:
        if self.count == len(self.pts):
            self.pts = np.concatenate([self.pts, np.zeros_like(self.pts)])
        i, j = self._cells(np.asarray(p, dtype=float))
        self.cells[i, j] = self.count
        self.pts[self.count] = p
        self.count += 1

    @property
    def points(self) -> np.ndarray:
        return self.pts[: self.count].copy()

    def free(self, cand: np.ndarray) -> np.ndarray:
        """Vectorised test: is every accepted point at distance >= spacing?"""
        ij = self._cells(cand)
        idx = self.cells[ij[:, None, 0] + self.offsets[None, :, 0], ij[:, None, 1] + self.offsets[None, :, 1]]
        d = cand[:, None, :] - self.pts[np.maximum(idx, 0)]
        close = ((d * d).sum(-1) < self.spacing2) & (idx >= 0)
        return ~close.any(1)

    def free_one(self, p) -> bool:
        x, y = float(p[0]), float(p[1])
        ci = min(max(int((x - self.origin[0]) // self.h), 0), self.shape[0] - 1) + self.reach
        cj = min(max(int((y - self.origin[1]) // self.h), 0), self.shape[1] - 1) + self.reach
        r = self.reach
        block = self.cells[ci - r:ci + r + 1, cj - r:cj + r + 1]
        for k in block[block >= 0].tolist():
            dx = x - self.pts[k, 0]
            dy = y - self.pts[k, 1]
            if dx * dx + dy * dy < self.spacing2:
                return False
        return True


def place_points(domain: DomainBox, l_min: float, seed: int | np.random.Generator | None = None,
                 max_trials: int = 10_000, initial: np.ndarray | None = None) -> np.ndarray:
    """Random sequential adsorption of points at mutual distance ``>= l_min``.

    Uniform candidates are accepted when no previously accepted point lies
    closer than ``l_min``. Placement stops after ``max_trials`` consecutive
    rejections. ``initial`` points count as already accepted and are
    returned first.
    """
    if not l_min > 0:
        raise ValueError("l_min must be positive")
    if max_trials < 1:
        raise ValueError("max_trials must be >= 1")
    if domain.area <= 0:
        raise ValueError("degenerate domain")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    grid = _Grid(domain, l_min)
    if initial is not None:
        for p in np.asarray(initial, dtype=float).reshape(-1, 2):
            grid.add(p)
    lo, hi = np.asarray(domain.min_corner, float), np.asarray(domain.max_corner, float)
    rejects = 0
    while True:
        cand = rng.uniform(lo, hi, size=(BATCH, 2))
        prev = -1
        for i in np.flatnonzero(grid.free(cand)):
            run = i - prev - 1
            if rejects + run >= max_trials:
                return grid.points
            rejects += run
            prev = i
            # re-test against points accepted earlier in this batch
            if grid.free_one(cand[i]):
                grid.add(cand[i])
                rejects = 0
            else:
                rejects += 1
                if rejects >= max_trials:
                    return grid.points
        rejects += BATCH - 1 - prev
        if rejects >= max_trials:
            return grid.points
