"""Summary statistic estimators: edge-corrected kernel intensity fields,
Ripley's K with translation edge correction, and the empty-space function."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import ndtr

from .geometry import PointPattern, RGrid, Window, area, pairwise_distances

# Kernel bandwidth 1.25 on a [0,10]^2 window, scaled with window diameter.
_REFERENCE_BANDWIDTH = 1.25
_REFERENCE_DIAMETER = math.sqrt(200.0)

# Floor for plugged-in intensity values in the K estimator weights; near-zero
# estimates would otherwise blow up single pair terms.
INTENSITY_FLOOR = 1e-8


def default_bandwidth(w: Window) -> float:
    """Kernel bandwidth scaled to the window diameter (1.25 on [0,10]^2)."""
    diam = math.hypot(w.width, w.height)
    return _REFERENCE_BANDWIDTH * diam / _REFERENCE_DIAMETER


def default_r_max(w: Window) -> float:
    """Upper distance limit: one quarter of the shorter window side."""
    return min(w.sides) / 4.0


@dataclass(frozen=True)
class Curve:
    """A summary statistic evaluated on an r-grid."""

    grid: RGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.values.shape:
            raise ValueError("values must match the grid in length")
        object.__setattr__(self, "values", vals)
        self.values.setflags(write=False)

    def integral(self):
        """Weighted trapezoid integral of the curve against the grid weights."""
        return float(np.sum(self.grid.quad_weights() * self.values))


def mean_curve(curves) -> Curve:
    """Pointwise mean of curves sharing one grid."""
    curves = list(curves)
    if not curves:
        raise ValueError("need at least one curve")
    grid = curves[0].grid
    for c in curves[1:]:
        if not np.array_equal(c.grid.values, grid.values):
            raise ValueError("curves must share the same grid")
    return Curve(grid, np.mean([c.values for c in curves], axis=0))


@dataclass(frozen=True)
class IntensityField:
    """Edge-corrected kernel intensity on a pixel grid over the window."""

    window: Window
    values: np.ndarray  # (nx, ny) at cell centers
    sigma: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2:
            raise ValueError("values must be a 2-D pixel array")
        object.__setattr__(self, "values", vals)
        self.values.setflags(write=False)

    @property
    def shape(self):
        return self.values.shape

    def cell_area(self):
        nx, ny = self.values.shape
        return (self.window.width / nx) * (self.window.height / ny)

    def integral(self):
        """Midpoint-rule integral over the window."""
        return float(self.values.sum() * self.cell_area())

    def at(self, x, y):
        """Bilinear interpolation at arbitrary locations, clamped at the
        boundary pixels."""
        w = self.window
        nx, ny = self.values.shape
        fx = (np.asarray(x, dtype=float) - w.xmin) / w.width * nx - 0.5
        fy = (np.asarray(y, dtype=float) - w.ymin) / w.height * ny - 0.5
        fx = np.clip(fx, 0.0, nx - 1.0)
        fy = np.clip(fy, 0.0, ny - 1.0)
        ix = np.clip(np.floor(fx).astype(int), 0, nx - 2)
        iy = np.clip(np.floor(fy).astype(int), 0, ny - 2)
        tx = fx - ix
        ty = fy - iy
        v = self.values
        return ((1 - tx) * (1 - ty) * v[ix, iy]
                + tx * (1 - ty) * v[ix + 1, iy]
                + (1 - tx) * ty * v[ix, iy + 1]
                + tx * ty * v[ix + 1, iy + 1])


def edge_correction(point, w: Window, sigma) -> float:
    """Mass of the Gaussian kernel centered at `point` that falls inside the
    window; a product of two 1-D normal CDF differences."""
    x, y = point
    mx = ndtr((w.xmax - x) / sigma) - ndtr((w.xmin - x) / sigma)
    my = ndtr((w.ymax - y) / sigma) - ndtr((w.ymin - y) / sigma)
    return float(mx * my)


def _pixel_centers(w: Window, nx, ny):
    xs = np.linspace(w.xmin, w.xmax, nx + 1)
    ys = np.linspace(w.ymin, w.ymax, ny + 1)
    return (xs[:-1] + xs[1:]) / 2.0, (ys[:-1] + ys[1:]) / 2.0


def kernel_intensity(p: PointPattern, sigma=None, nx=128, ny=None) -> IntensityField:
    """Edge-corrected Gaussian kernel intensity estimate on a pixel grid.

    Each point contributes an isotropic Gaussian of standard deviation sigma,
    divided by the kernel mass remaining inside the window, so the field
    integrates to the point count up to pixelization error.
    """
    w = p.window
    if sigma is None:
        sigma = default_bandwidth(w)
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    if ny is None:
        ny = nx
    if nx < 8 or ny < 8:
        raise ValueError("need at least 8 pixels per axis")

    cx, cy = _pixel_centers(w, nx, ny)
    if p.n == 0:
        return IntensityField(w, np.zeros((nx, ny)), float(sigma))

    # separable Gaussian: one outer product per point, scaled by 1/c_W(y)
    gx = np.exp(-((cx[:, None] - p.x[None, :]) / sigma) ** 2 / 2.0)  # (nx, n)
    gy = np.exp(-((cy[:, None] - p.y[None, :]) / sigma) ** 2 / 2.0)  # (ny, n)
    norm = 1.0 / (2.0 * math.pi * sigma ** 2)
    corr_x = ndtr((w.xmax - p.x) / sigma) - ndtr((w.xmin - p.x) / sigma)
    corr_y = ndtr((w.ymax - p.y) / sigma) - ndtr((w.ymin - p.y) / sigma)
    weights = norm / np.maximum(corr_x * corr_y, 1e-300)
    field = np.einsum("in,n,jn->ij", gx, weights, gy)
    return IntensityField(w, field, float(sigma))


def kernel_intensity_at_points(p: PointPattern, sigma=None,
                               leave_one_out=True) -> np.ndarray:
    """Edge-corrected Gaussian kernel intensity evaluated exactly at the
    pattern's own points.

    With `leave_one_out` (the default) each point's own kernel mass is
    excluded from its estimate; this is the standard plug-in for the
    inhomogeneous K estimator, where including the self-contribution would
    inflate the intensity at every data point by k(0)/c_W in a way that
    depends on the point count.
    """
    w = p.window
    if sigma is None:
        sigma = default_bandwidth(w)
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    if p.n == 0:
        return np.zeros(0)
    d2 = np.sum((p.points[:, None, :] - p.points[None, :, :]) ** 2, axis=-1)
    g = np.exp(-d2 / (2.0 * sigma ** 2))
    norm = 1.0 / (2.0 * math.pi * sigma ** 2)
    corr_x = ndtr((w.xmax - p.x) / sigma) - ndtr((w.xmin - p.x) / sigma)
    corr_y = ndtr((w.ymax - p.y) / sigma) - ndtr((w.ymin - p.y) / sigma)
    weights = norm / np.maximum(corr_x * corr_y, 1e-300)
    lam = g @ weights
    if leave_one_out:
        lam = lam - weights
    return lam


def k_hat(p: PointPattern, grid: RGrid, intensity=None) -> Curve:
    """Ripley's K estimator with translation edge correction.

    Sums 1 / (lambda(y1) lambda(y2) |W intersect W_(y1-y2)|) over ordered
    distinct pairs with distance strictly below r.  `intensity` is either a
    constant, an IntensityField (evaluated at the points by bilinear
    interpolation), a per-point array of intensity values, or None for the
    leave-one-out kernel estimate at the default bandwidth.
    """
    w = p.window
    if grid.r_max >= min(w.sides):
        raise ValueError("max grid value must be below the shorter window side")
    if p.n < 2:
        return Curve(grid, np.zeros(len(grid)))

    if intensity is None:
        lam = kernel_intensity_at_points(p)
    elif isinstance(intensity, IntensityField):
        lam = intensity.at(p.x, p.y)
    elif isinstance(intensity, np.ndarray):
        if intensity.shape != (p.n,):
            raise ValueError("per-point intensity must have one value per point")
        lam = intensity
    else:
        lam = np.full(p.n, float(intensity))
    lam = np.maximum(lam, INTENSITY_FLOOR)

    iu = np.triu_indices(p.n, k=1)
    diffs = p.points[iu[0]] - p.points[iu[1]]
    dists = np.hypot(diffs[:, 0], diffs[:, 1])
    overlap = ((w.width - np.abs(diffs[:, 0]))
               * (w.height - np.abs(diffs[:, 1])))
    # pairs farther apart than the window cannot enter any r in the grid
    overlap = np.maximum(overlap, 1e-300)
    pair_w = 2.0 / (lam[iu[0]] * lam[iu[1]] * overlap)

    order = np.argsort(dists, kind="stable")
    dists = dists[order]
    csum = np.concatenate([[0.0], np.cumsum(pair_w[order])])
    idx = np.searchsorted(dists, grid.values, side="left")  # strict "< r"
    return Curve(grid, csum[idx])


def f_hat(p: PointPattern, grid: RGrid, probe_spacing=None) -> Curve:
    """Empty-space function estimate on a regular probe lattice.

    For each r, the fraction of probe points at least r away from the window
    boundary whose nearest pattern point lies within distance r.
    """
    w = p.window
    if probe_spacing is None:
        probe_spacing = min(w.sides) / 64.0
    if probe_spacing <= 0:
        raise ValueError("probe_spacing must be > 0")
    r_hi = grid.r_max
    if 2.0 * r_hi >= min(w.sides):
        raise ValueError("max grid value erodes the window to nothing")

    nx = max(int(w.width / probe_spacing), 1)
    ny = max(int(w.height / probe_spacing), 1)
    px, py = _pixel_centers(w, nx, ny)
    gx, gy = np.meshgrid(px, py, indexing="ij")
    probes = np.column_stack([gx.ravel(), gy.ravel()])
    # distance of each probe to the window boundary
    margin = np.minimum.reduce([
        probes[:, 0] - w.xmin, w.xmax - probes[:, 0],
        probes[:, 1] - w.ymin, w.ymax - probes[:, 1],
    ])
    if not np.any(margin >= r_hi):
        raise ValueError("no probe points survive erosion at the largest r; "
                         "reduce r_max or the probe spacing")

    if p.n == 0:
        nearest = np.full(probes.shape[0], np.inf)
    else:
        nearest, _ = cKDTree(p.points).query(probes, k=1)

    values = np.empty(len(grid))
    for i, r in enumerate(grid.values):
        in_core = margin >= r
        values[i] = np.mean(nearest[in_core] <= r) if np.any(in_core) else 0.0
    return Curve(grid, values)
