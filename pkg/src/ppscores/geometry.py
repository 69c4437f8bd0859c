"""Rectangular observation windows and point patterns.

All windows are axis-aligned rectangles, which gives closed forms for every
edge-correction quantity used by the estimators (translation overlap, erosion,
Gaussian boundary mass).
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle [xmin, xmax] x [ymin, ymax]."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError(
                "window requires xmax > xmin and ymax > ymin, got "
                f"[{self.xmin}, {self.xmax}] x [{self.ymin}, {self.ymax}]"
            )

    @property
    def width(self):
        return self.xmax - self.xmin

    @property
    def height(self):
        return self.ymax - self.ymin

    @property
    def sides(self):
        return (self.width, self.height)

    def contains(self, x, y):
        """Vectorized membership test, boundary inclusive."""
        x = np.asarray(x)
        y = np.asarray(y)
        return (x >= self.xmin) & (x <= self.xmax) & (y >= self.ymin) & (y <= self.ymax)

    def expand(self, buffer):
        """Grow the rectangle by `buffer` on all four sides."""
        if buffer < 0:
            raise ValueError("buffer must be >= 0")
        return Window(self.xmin - buffer, self.xmax + buffer,
                      self.ymin - buffer, self.ymax + buffer)


def area(w: Window) -> float:
    """Area of the rectangle."""
    return w.width * w.height


def translation_overlap(w: Window, dx: float, dy: float) -> float:
    """Area of W intersected with W shifted by (dx, dy).

    For a rectangle this is (width - |dx|)_+ * (height - |dy|)_+.  Symmetric
    in the sign of the shift and equal to area(w) at (0, 0).
    """
    ox = w.width - abs(dx)
    oy = w.height - abs(dy)
    if ox <= 0.0 or oy <= 0.0:
        return 0.0
    return ox * oy


def erode(w: Window, r: float):
    """Rectangle shrunk by r on all sides, or None when degenerate."""
    if r < 0:
        raise ValueError("erosion distance must be >= 0")
    if 2.0 * r >= w.width or 2.0 * r >= w.height:
        return None
    return Window(w.xmin + r, w.xmax - r, w.ymin + r, w.ymax - r)


@dataclass(frozen=True)
class PointPattern:
    """A finite list of 2D points observed inside a window.

    Points are stored as an (n, 2) float array; construction checks that every
    point lies inside the window (boundary inclusive).  Duplicate points are
    permitted; `validate` reports them.
    """

    points: np.ndarray
    window: Window

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            pts = np.empty((0, 2))
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must be an (n, 2) array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        inside = self.window.contains(pts[:, 0], pts[:, 1])
        if not np.all(inside):
            bad = pts[~inside][0]
            raise ValueError(f"point {tuple(bad)} lies outside the window")
        object.__setattr__(self, "points", pts)
        self.points.setflags(write=False)

    def __len__(self):
        return self.points.shape[0]

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]

    def validate(self):
        """Report data issues that are allowed but suspicious.

        Returns a dict with the number of duplicated points (exact coordinate
        ties) and the number of points exactly on the window boundary.
        """
        n_dup = 0
        if self.n > 1:
            uniq = np.unique(self.points, axis=0)
            n_dup = self.n - uniq.shape[0]
        w = self.window
        on_edge = (
            (self.x == w.xmin) | (self.x == w.xmax)
            | (self.y == w.ymin) | (self.y == w.ymax)
        )
        return {"n_duplicates": int(n_dup), "n_on_boundary": int(np.sum(on_edge))}

    def translate(self, dx, dy):
        """Shift pattern and window together by (dx, dy)."""
        w = Window(self.window.xmin + dx, self.window.xmax + dx,
                   self.window.ymin + dy, self.window.ymax + dy)
        return PointPattern(self.points + np.array([dx, dy]), w)


def pairwise_distances(p: PointPattern) -> np.ndarray:
    """Euclidean distances of all unordered point pairs, length n(n-1)/2."""
    if p.n < 2:
        return np.empty(0)
    from scipy.spatial.distance import pdist

    return pdist(p.points)


@dataclass(frozen=True)
class RGrid:
    """Evaluation grid of distances r with non-negative weights w(r)."""

    values: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("grid values must be a non-empty 1-D array")
        if vals[0] < 0 or np.any(np.diff(vals) <= 0):
            raise ValueError("grid values must be strictly increasing and >= 0")
        if self.weights is None:
            wts = np.ones_like(vals)
        else:
            wts = np.asarray(self.weights, dtype=float)
        if wts.shape != vals.shape:
            raise ValueError("weights must match grid values in length")
        if np.any(wts < 0):
            raise ValueError("weights must be non-negative")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "weights", wts)
        self.values.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return self.values.size

    @property
    def r_max(self):
        return float(self.values[-1])

    def quad_weights(self):
        """Trapezoid quadrature weights combined with w(r).

        Integrals of a function f sampled on this grid are approximated by
        sum(quad_weights() * f).
        """
        v = self.values
        q = np.empty_like(v)
        if v.size == 1:
            q[0] = 1.0
        else:
            d = np.diff(v)
            q[0] = d[0] / 2.0
            q[-1] = d[-1] / 2.0
            q[1:-1] = (d[:-1] + d[1:]) / 2.0
        return q * self.weights


def uniform_rgrid(r_max, n_r, weights=None):
    """n_r equally spaced values in (0, r_max]."""
    if r_max <= 0 or n_r < 1:
        raise ValueError("need r_max > 0 and n_r >= 1")
    vals = np.linspace(r_max / n_r, r_max, n_r)
    return RGrid(vals, weights)
