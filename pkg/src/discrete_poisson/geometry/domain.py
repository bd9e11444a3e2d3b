from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DomainBox:
    """Axis-aligned rectangle ``[min_corner, max_corner]``."""

    min_corner: tuple[float, float]
    max_corner: tuple[float, float]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.min_corner)
        hi = tuple(float(v) for v in self.max_corner)
        if len(lo) != 2 or len(hi) != 2:
            raise ValueError("DomainBox is two-dimensional")
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    @classmethod
    def from_size(cls, width: float, height: float) -> "DomainBox":
        return cls((0.0, 0.0), (width, height))

    @property
    def size(self) -> tuple[float, float]:
        return (self.max_corner[0] - self.min_corner[0], self.max_corner[1] - self.min_corner[1])

    @property
    def area(self) -> float:
        w, h = self.size
        return w * h if w > 0 and h > 0 else 0.0

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.min_corner) + np.asarray(self.max_corner))

    def validate(self) -> None:
        w, h = self.size
        if not (w > 0 and h > 0):
            raise ValueError(f"degenerate domain {self.min_corner} - {self.max_corner}")

    def distance_to_boundary(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        lo, hi = np.asarray(self.min_corner), np.asarray(self.max_corner)
        return np.minimum(pts - lo, hi - pts).min(axis=-1)

    def contains(self, pts: np.ndarray, tol: float = 0.0) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        lo, hi = np.asarray(self.min_corner), np.asarray(self.max_corner)
        return np.all((pts >= lo - tol) & (pts <= hi + tol), axis=-1)

    def shrink(self, margin: float) -> "DomainBox":
        lo = np.asarray(self.min_corner) + margin
        hi = np.asarray(self.max_corner) - margin
        return DomainBox(tuple(lo), tuple(hi))
