"""Seeded samplers for the point process model families.

Every sampler is a pure function of (spec, window, seed).  Monte-Carlo loops
derive per-draw seeds with `child_seed`, so draws can run in any order (or in
parallel) and still reproduce bit-identically.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.linalg import cholesky
from scipy.spatial.distance import pdist, squareform

from .geometry import PointPattern, Window, area


# ---------------------------------------------------------------------------
# Seeds


def child_seed(root, *path):
    """Derive a reproducible integer seed from a root seed and an index path."""
    ss = np.random.SeedSequence([int(root), *[int(p) for p in path]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(int(seed))


# ---------------------------------------------------------------------------
# Intensity functions


@dataclass(frozen=True)
class IntensityFn:
    """A non-negative intensity surface with a known upper bound.

    `func` maps coordinate arrays (x, y) to intensity values (points per unit
    area).  `lambda_max` must dominate the function on every window it is used
    with; the thinning sampler audits this and raises on violations.
    """

    func: callable
    lambda_max: float
    label: str = ""

    def __post_init__(self):
        if not self.lambda_max >= 0:
            raise ValueError("lambda_max must be >= 0")

    def __call__(self, x, y):
        return np.asarray(self.func(np.asarray(x, dtype=float),
                                    np.asarray(y, dtype=float)), dtype=float)

    def integral(self, w: Window, n=256):
        """Midpoint-rule integral over the window on an n x n grid."""
        xs = np.linspace(w.xmin, w.xmax, n + 1)
        ys = np.linspace(w.ymin, w.ymax, n + 1)
        cx = (xs[:-1] + xs[1:]) / 2.0
        cy = (ys[:-1] + ys[1:]) / 2.0
        gx, gy = np.meshgrid(cx, cy, indexing="ij")
        cell = (w.width / n) * (w.height / n)
        return float(np.sum(self(gx, gy)) * cell)


def constant_intensity(value):
    if value < 0:
        raise ValueError("intensity must be >= 0")
    return IntensityFn(lambda x, y: np.full_like(x, float(value)),
                       float(value), label=f"const({value})")


def radial_intensity(window: Window, total=50.0):
    """Intensity proportional to sqrt(x^2 + y^2), scaled to `total` expected
    points on the window.  The normalizing constant is found by quadrature."""
    raw = IntensityFn(lambda x, y: np.sqrt(x ** 2 + y ** 2),
                      math.hypot(max(abs(window.xmin), abs(window.xmax)),
                                 max(abs(window.ymin), abs(window.ymax))))
    c = total / raw.integral(window, n=512)
    return IntensityFn(lambda x, y: c * np.sqrt(x ** 2 + y ** 2),
                       c * raw.lambda_max, label=f"radial(total={total})")


def gaussian_intensity(scale=100.0, mean=(0.0, 0.0), eta=(1.0, 1.0), rho=0.0):
    """`scale` times a bivariate Gaussian density with per-coordinate standard
    deviations `eta` and correlation `rho`."""
    mx, my = float(mean[0]), float(mean[1])
    ex, ey = float(eta[0]), float(eta[1])
    if ex <= 0 or ey <= 0 or not -1 < rho < 1:
        raise ValueError("need positive eta and correlation in (-1, 1)")
    det = 1.0 - rho ** 2
    norm = scale / (2.0 * math.pi * ex * ey * math.sqrt(det))

    def f(x, y):
        u = (x - mx) / ex
        v = (y - my) / ey
        q = (u ** 2 - 2.0 * rho * u * v + v ** 2) / det
        return norm * np.exp(-q / 2.0)

    return IntensityFn(f, norm, label=f"gauss(scale={scale})")


@dataclass(frozen=True)
class GridIntensity:
    """Bilinear interpolant of intensity values at pixel centers.

    Used for kernel-smoothed intensities where the surface has no analytic
    form; the interpolant never exceeds the grid maximum, so `lambda_max`
    is exact.
    """

    window: Window
    values: np.ndarray  # (nx, ny) at cell centers

    def __call__(self, x, y):
        w, v = self.window, self.values
        nx, ny = v.shape
        fx = (np.asarray(x, dtype=float) - w.xmin) / w.width * nx - 0.5
        fy = (np.asarray(y, dtype=float) - w.ymin) / w.height * ny - 0.5
        fx = np.clip(fx, 0.0, nx - 1.0)
        fy = np.clip(fy, 0.0, ny - 1.0)
        ix = np.clip(np.floor(fx).astype(int), 0, nx - 2)
        iy = np.clip(np.floor(fy).astype(int), 0, ny - 2)
        tx = fx - ix
        ty = fy - iy
        return ((1 - tx) * (1 - ty) * v[ix, iy]
                + tx * (1 - ty) * v[ix + 1, iy]
                + (1 - tx) * ty * v[ix, iy + 1]
                + tx * ty * v[ix + 1, iy + 1])


def grid_intensity_fn(window, values, label=""):
    values = np.asarray(values, dtype=float)
    if np.any(values < 0):
        raise ValueError("intensity values must be >= 0")
    return IntensityFn(GridIntensity(window, values), float(values.max()),
                       label=label)


# ---------------------------------------------------------------------------
# Model specifications


@dataclass(frozen=True)
class McmcConfig:
    """Settings for the Strauss birth-death chain.

    `burn_in` counts proposals; None selects the default 10 * ceil(beta * |W|).
    Birth and death are proposed with probability 1/2 each.
    """

    burn_in: int = None

    def __post_init__(self):
        if self.burn_in is not None and self.burn_in < 1:
            raise ValueError("burn_in must be >= 1")


@dataclass(frozen=True)
class HomPoisson:
    lam: float

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")

    def sample(self, w, seed):
        return sample_hom_poisson(self.lam, w, seed)


@dataclass(frozen=True)
class InhomPoisson:
    intensity: IntensityFn

    def sample(self, w, seed):
        return sample_inhom_poisson(self.intensity, w, seed)


@dataclass(frozen=True)
class Strauss:
    beta: float
    gamma: float
    range_R: float
    mcmc: McmcConfig = field(default_factory=McmcConfig)

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must be in (0, 1]; gamma > 1 is not integrable")
        if self.range_R <= 0:
            raise ValueError("range_R must be > 0")

    def sample(self, w, seed):
        return sample_strauss(self.beta, self.gamma, self.range_R, w,
                              self.mcmc, seed)


@dataclass(frozen=True)
class GaussianKernel:
    sigma: float

    @property
    def default_buffer(self):
        return 4.0 * self.sigma

    def sample_displacements(self, n, rng):
        return rng.normal(scale=self.sigma, size=(n, 2))


@dataclass(frozen=True)
class DiskKernel:
    """Uniform dispersal on the disk b(0, sigma) (Matern cluster)."""

    sigma: float

    @property
    def default_buffer(self):
        return self.sigma

    def sample_displacements(self, n, rng):
        r = self.sigma * np.sqrt(rng.uniform(size=n))
        theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


@dataclass(frozen=True)
class CauchyKernel:
    """Isotropic bivariate Cauchy dispersal; radial CDF inverts in closed form:
    F(r) = 1 - (1 + r^2/sigma^2)^(-1/2)."""

    sigma: float

    @property
    def default_buffer(self):
        # the radial tail decays like sigma/r; 4 sigma leaves a truncation
        # bias of several MC standard errors in the K oracle, 30 sigma does not
        return 30.0 * self.sigma

    def sample_displacements(self, n, rng):
        u = rng.uniform(size=n)
        r = self.sigma * np.sqrt((1.0 - u) ** -2 - 1.0)
        theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def bessel_radial_cdf(r, sigma, nu):
    """Radial CDF of the Bessel (variance-Gamma) dispersal kernel.

    The kernel density is k(w) = (2 pi sigma^2 2^nu Gamma(nu+1))^(-1)
    (|w|/sigma)^nu K_nu(|w|/sigma), which integrates to one; the radial CDF is
    F(r) = 1 - (r/sigma)^(nu+1) K_(nu+1)(r/sigma) / (2^nu Gamma(nu+1)).
    """
    from scipy.special import gamma as gamma_fn, kv

    u = np.asarray(r, dtype=float) / sigma
    out = np.ones_like(u)
    pos = u > 0
    out[pos] = 1.0 - (u[pos] ** (nu + 1) * kv(nu + 1, u[pos])
                      / (2.0 ** nu * gamma_fn(nu + 1)))
    out[~pos] = 0.0
    return np.clip(out, 0.0, 1.0)


@lru_cache(maxsize=32)
def _bessel_radial_inverse(sigma, nu):
    # Tabulate the closed-form CDF and invert by interpolation.  The kernel
    # tail decays like exp(-r/sigma), so 40 sigma covers the inversion range.
    r = np.linspace(0.0, 40.0 * sigma * (1.0 + nu), 8192)
    cdf = bessel_radial_cdf(r, sigma, nu)
    cdf[-1] = 1.0
    keep = np.concatenate([[True], np.diff(cdf) > 0])
    return cdf[keep], r[keep]


@dataclass(frozen=True)
class VarGammaKernel:
    sigma: float
    nu: float

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError("nu must be > 0")

    @property
    def default_buffer(self):
        return 4.0 * self.sigma * (1.0 + self.nu)

    def sample_displacements(self, n, rng):
        cdf, r_tab = _bessel_radial_inverse(float(self.sigma), float(self.nu))
        r = np.interp(rng.uniform(size=n), cdf, r_tab)
        theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


@dataclass(frozen=True)
class Cluster:
    """Neyman-Scott cluster process: Poisson parents, Poisson(offspring_mean)
    children displaced by the dispersal kernel, children outside the window
    discarded.  Parents are drawn on the window expanded by `buffer`."""

    parent: object  # float kappa or IntensityFn
    offspring_mean: float
    kernel: object
    buffer: float = None

    def __post_init__(self):
        if self.offspring_mean < 0:
            raise ValueError("offspring_mean must be >= 0")
        if self.buffer is not None and self.buffer < 0:
            raise ValueError("buffer must be >= 0")

    def sample(self, w, seed):
        return sample_cluster(self, w, seed)


@dataclass(frozen=True)
class LGCP:
    """Log-Gaussian Cox process with exponential covariance
    tau2 * exp(-d / scale), simulated on a grid_n x grid_n lattice."""

    mu: float
    tau2: float
    scale: float
    grid_n: int = 64

    def __post_init__(self):
        if self.tau2 < 0:
            raise ValueError("tau2 must be >= 0")
        if self.scale <= 0:
            raise ValueError("scale must be > 0")
        if self.grid_n < 16:
            raise ValueError("grid_n must be >= 16")

    def sample(self, w, seed):
        return sample_lgcp(self.mu, self.tau2, self.scale, self.grid_n, w, seed)


@dataclass(frozen=True)
class Mixture:
    """Poisson process with intensity alpha * smoothed + (1 - alpha) * nu_flat."""

    alpha: float
    smoothed: IntensityFn
    nu_flat: float

    def __post_init__(self):
        if not 0 <= self.alpha <= 1:
            raise ValueError("alpha must be in [0, 1]")
        if self.nu_flat < 0:
            raise ValueError("nu_flat must be >= 0")

    def intensity(self):
        a, nu, mu = self.alpha, self.nu_flat, self.smoothed

        def f(x, y):
            return a * mu(x, y) + (1.0 - a) * nu

        return IntensityFn(f, a * mu.lambda_max + (1.0 - a) * nu,
                           label=f"mixture(alpha={a})")

    def sample(self, w, seed):
        return sample_inhom_poisson(self.intensity(), w, seed)


def sample(model, w: Window, seed) -> PointPattern:
    """Draw one pattern from any model spec."""
    return model.sample(w, seed)


# ---------------------------------------------------------------------------
# Samplers


def sample_hom_poisson(lam, w: Window, seed) -> PointPattern:
    """Poisson(lam * |W|) points, i.i.d. uniform on the window."""
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    rng = _as_rng(seed)
    n = rng.poisson(lam * area(w))
    x = rng.uniform(w.xmin, w.xmax, size=n)
    y = rng.uniform(w.ymin, w.ymax, size=n)
    return PointPattern(np.column_stack([x, y]), w)


def sample_inhom_poisson(intensity: IntensityFn, w: Window, seed) -> PointPattern:
    """Thinning of a homogeneous Poisson(lambda_max) draw."""
    rng = _as_rng(seed)
    lam_max = intensity.lambda_max
    if not np.isfinite(lam_max):
        raise ValueError("lambda_max must be finite for thinning")
    dominating = sample_hom_poisson(lam_max, w, rng)
    if dominating.n == 0:
        return dominating
    vals = intensity(dominating.x, dominating.y)
    if np.any(vals > lam_max * (1.0 + 1e-9)):
        raise ValueError(
            "intensity exceeds its declared lambda_max "
            f"(max observed {vals.max():g} > {lam_max:g})"
        )
    keep = rng.uniform(size=dominating.n) * lam_max < vals
    return PointPattern(dominating.points[keep], w)


def _close_pair_count(points, new_point, range_R):
    if points.shape[0] == 0:
        return 0
    d2 = np.sum((points - new_point) ** 2, axis=1)
    return int(np.sum(d2 < range_R ** 2))


def sample_strauss(beta, gamma, range_R, w: Window, mcmc: McmcConfig, seed) -> PointPattern:
    """Birth-death Metropolis-Hastings draw from the Strauss density
    proportional to beta^n gamma^(s_R), gamma in (0, 1].

    Births propose a uniform location, deaths remove a uniformly chosen
    point; each is proposed with probability 1/2.  The chain starts from a
    homogeneous Poisson(beta) draw and runs `burn_in` proposals.

    The chain operates on the window expanded by the interaction range and
    the result is clipped back to `w`, so that points near the boundary of
    the observation window feel inhibition from outside it.
    """
    Strauss(beta, gamma, range_R)  # reuse parameter validation
    rng = _as_rng(seed)
    sim_w = w.expand(range_R)
    A = area(sim_w)
    burn_in = mcmc.burn_in
    if burn_in is None:
        burn_in = 10 * math.ceil(beta * A)

    state = sample_hom_poisson(beta, sim_w, rng).points.copy()
    pts = list(state)
    log_gamma = math.log(gamma)

    for _ in range(burn_in):
        n = len(pts)
        if rng.uniform() < 0.5:
            # birth
            u = np.array([rng.uniform(sim_w.xmin, sim_w.xmax),
                          rng.uniform(sim_w.ymin, sim_w.ymax)])
            t = _close_pair_count(np.asarray(pts).reshape(n, 2), u, range_R)
            log_ratio = math.log(beta) + t * log_gamma + math.log(A) - math.log(n + 1)
            if log_ratio >= 0 or rng.uniform() < math.exp(log_ratio):
                pts.append(u)
        else:
            # death
            if n == 0:
                continue
            i = rng.integers(n)
            arr = np.asarray(pts).reshape(n, 2)
            victim = arr[i]
            others = np.delete(arr, i, axis=0)
            t = _close_pair_count(others, victim, range_R)
            log_ratio = math.log(n) - math.log(beta) - t * log_gamma - math.log(A)
            if log_ratio >= 0 or rng.uniform() < math.exp(log_ratio):
                pts.pop(i)

    points = np.asarray(pts).reshape(len(pts), 2)
    inside = ((points[:, 0] >= w.xmin) & (points[:, 0] <= w.xmax)
              & (points[:, 1] >= w.ymin) & (points[:, 1] <= w.ymax))
    return PointPattern(points[inside], w)


def sample_cluster(spec: Cluster, w: Window, seed) -> PointPattern:
    """Neyman-Scott draw; see the Cluster spec for the construction."""
    rng = _as_rng(seed)
    buffer = spec.buffer if spec.buffer is not None else spec.kernel.default_buffer
    parent_window = w.expand(buffer)
    if isinstance(spec.parent, IntensityFn):
        parents = sample_inhom_poisson(spec.parent, parent_window, rng)
    else:
        parents = sample_hom_poisson(float(spec.parent), parent_window, rng)
    if parents.n == 0:
        return PointPattern(np.empty((0, 2)), w)
    counts = rng.poisson(spec.offspring_mean, size=parents.n)
    total = int(counts.sum())
    if total == 0:
        return PointPattern(np.empty((0, 2)), w)
    centers = np.repeat(parents.points, counts, axis=0)
    children = centers + spec.kernel.sample_displacements(total, rng)
    keep = w.contains(children[:, 0], children[:, 1])
    return PointPattern(children[keep], w)


@lru_cache(maxsize=4)
def _lgcp_cholesky(tau2, scale, grid_n, xmin, xmax, ymin, ymax):
    """Dense lower Cholesky factor of the exponential covariance on the grid
    of cell centers.  Jitter is added on factorization failure."""
    xs = np.linspace(xmin, xmax, grid_n + 1)
    ys = np.linspace(ymin, ymax, grid_n + 1)
    cx = (xs[:-1] + xs[1:]) / 2.0
    cy = (ys[:-1] + ys[1:]) / 2.0
    gx, gy = np.meshgrid(cx, cy, indexing="ij")
    coords = np.column_stack([gx.ravel(), gy.ravel()])
    cov = tau2 * np.exp(-squareform(pdist(coords)) / scale)
    jitter = 0.0
    for _ in range(4):
        try:
            return cholesky(cov + jitter * np.eye(cov.shape[0]), lower=True)
        except np.linalg.LinAlgError:
            jitter = 1e-10 * max(tau2, 1.0) if jitter == 0.0 else jitter * 100.0
    raise np.linalg.LinAlgError(
        "LGCP covariance is not positive definite even with jitter"
    )


def sample_lgcp(mu, tau2, scale, grid_n, w: Window, seed) -> PointPattern:
    """Draw from a log-Gaussian Cox process.

    The Gaussian field is simulated at the cell centers of a grid_n x grid_n
    lattice; the intensity exp(field) is treated as piecewise constant per
    cell, with Poisson counts per cell placed uniformly within the cell.
    """
    LGCP(mu, tau2, scale, grid_n)  # validate
    rng = _as_rng(seed)
    n_cells = grid_n * grid_n
    if tau2 == 0.0:
        z = np.full(n_cells, mu)
    else:
        L = _lgcp_cholesky(float(tau2), float(scale), int(grid_n),
                           w.xmin, w.xmax, w.ymin, w.ymax)
        z = mu + L @ rng.standard_normal(n_cells)
    lam = np.exp(z).reshape(grid_n, grid_n)

    dx = w.width / grid_n
    dy = w.height / grid_n
    counts = rng.poisson(lam * dx * dy)
    total = int(counts.sum())
    ix, iy = np.nonzero(counts)
    reps = counts[ix, iy]
    cell_x = np.repeat(w.xmin + ix * dx, reps)
    cell_y = np.repeat(w.ymin + iy * dy, reps)
    x = cell_x + rng.uniform(size=total) * dx
    y = cell_y + rng.uniform(size=total) * dy
    return PointPattern(np.column_stack([x, y]), w)


def build_mixture_intensity(catalog: PointPattern, smoothing_pattern: PointPattern,
                            alpha, eta, total_count, w: Window,
                            grid_n=256) -> IntensityFn:
    """Semi-parametric mixture intensity for catalog-style data.

    The inhomogeneous part is a Gaussian-kernel smoothing of
    `smoothing_pattern` (per-coordinate standard deviation `eta`, correlation
    taken as the sample correlation of its coordinates), renormalized to unit
    mass on the window.  The homogeneous part is total_count / |W|.  The
    mixture integrates to `total_count` for any alpha.
    """
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must be in [0, 1]")
    if eta <= 0:
        raise ValueError("eta must be > 0")
    if catalog.n == 0 or smoothing_pattern.n == 0:
        raise ValueError("catalog and smoothing pattern must be non-empty")

    pts = smoothing_pattern.points
    if pts.shape[0] > 1:
        rho = float(np.corrcoef(pts[:, 0], pts[:, 1])[0, 1])
        if not np.isfinite(rho):
            rho = 0.0
        rho = float(np.clip(rho, -0.95, 0.95))
    else:
        rho = 0.0

    xs = np.linspace(w.xmin, w.xmax, grid_n + 1)
    ys = np.linspace(w.ymin, w.ymax, grid_n + 1)
    cx = (xs[:-1] + xs[1:]) / 2.0
    cy = (ys[:-1] + ys[1:]) / 2.0
    det = 1.0 - rho ** 2
    u = (cx[:, None] - pts[None, :, 0]) / eta  # (grid_n, m)
    v = (cy[:, None] - pts[None, :, 1]) / eta
    # accumulate one (possibly correlated) Gaussian bump per event
    if rho == 0.0:
        field = np.exp(-u ** 2 / 2.0) @ np.exp(-v ** 2 / 2.0).T
    else:
        q = (u[:, None, :] ** 2
             - 2.0 * rho * u[:, None, :] * v[None, :, :]
             + v[None, :, :] ** 2) / det
        field = np.exp(-q / 2.0).sum(axis=2)

    cell = (w.width / grid_n) * (w.height / grid_n)
    mass = field.sum() * cell
    mu_fn = grid_intensity_fn(w, total_count * field / mass,
                              label=f"smoothed(eta={eta}, rho={rho:.3f})")
    nu = total_count / area(w)
    return Mixture(alpha, mu_fn, nu).intensity()
