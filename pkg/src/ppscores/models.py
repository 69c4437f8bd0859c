"""Named model catalogs for the simulation studies, plus (de)serialization of
model specs for run configs."""

import math

from .geometry import Window
from .simulate import (CauchyKernel, Cluster, DiskKernel, GaussianKernel,
                       HomPoisson, InhomPoisson, IntensityFn, LGCP, McmcConfig,
                       Strauss, VarGammaKernel, constant_intensity,
                       gaussian_intensity, radial_intensity)

STUDY1_WINDOW = Window(0.0, 10.0, 0.0, 10.0)
STUDY2_WINDOW = Window(-5.0, 5.0, -5.0, 5.0)


def scaled_radial_intensity(window, total, factor=1.0, bound_window=None):
    """Radial intensity normalized to `total` points on `window`, multiplied
    by `factor`, with lambda_max valid on `bound_window` (used when cluster
    parents are drawn on a buffered window)."""
    base = radial_intensity(window, total)
    if bound_window is None:
        bound_window = window
    corners = max(
        math.hypot(x, y)
        for x in (bound_window.xmin, bound_window.xmax)
        for y in (bound_window.ymin, bound_window.ymax)
    )
    c = base.lambda_max / math.hypot(
        max(abs(window.xmin), abs(window.xmax)),
        max(abs(window.ymin), abs(window.ymax)),
    )

    def f(x, y):
        return factor * c * (x ** 2 + y ** 2) ** 0.5

    return IntensityFn(f, factor * c * corners,
                       label=f"radial(total={total}, factor={factor})")


def study1_models(window=STUDY1_WINDOW):
    """The five models of the first simulation study on [0,10]^2: two
    homogeneous Poisson intensities (1/2 and 3/5), a radial inhomogeneous
    Poisson with 50 expected points, a Strauss process with inhibition, and an
    inhomogeneous Thomas cluster process."""
    tht_sigma = 0.5
    parent = scaled_radial_intensity(
        window, 50.0, factor=0.5,
        bound_window=window.expand(4.0 * tht_sigma))
    return {
        "hP": HomPoisson(0.5),
        "hP+": HomPoisson(0.6),
        "ihP": InhomPoisson(radial_intensity(window, 50.0)),
        "Str": Strauss(1.15, 0.5, 1.0),
        "ihT": Cluster(parent, 2.0, GaussianKernel(tht_sigma)),
    }


def study2_models():
    """Gaussian-kernel Poisson models F1..F6 on [-5,5]^2; F1 generates the
    observations, the others perturb mean, spread, shape, or total count."""
    return {
        "F1": gaussian_intensity(100.0),
        "F2": gaussian_intensity(100.0, mean=(0.1, 0.0)),
        "F3": gaussian_intensity(100.0, eta=(0.9, 0.9)),
        "F4": gaussian_intensity(100.0, eta=(1.1, 1.1)),
        "F5": gaussian_intensity(100.0, rho=0.1),
        "F6": gaussian_intensity(105.0),
    }


def study2_model_specs():
    return {name: InhomPoisson(intensity)
            for name, intensity in study2_models().items()}


# ---------------------------------------------------------------------------
# Spec serialization (run-config format)


def intensity_to_dict(i: IntensityFn):
    raise NotImplementedError(
        "only config-parsed intensities round-trip; build configs from dicts")


def parse_intensity(d, window: Window, bound_window=None) -> IntensityFn:
    kind = d["kind"]
    if kind == "constant":
        return constant_intensity(d["value"])
    if kind == "radial":
        return scaled_radial_intensity(window, d["total"],
                                       factor=d.get("factor", 1.0),
                                       bound_window=bound_window)
    if kind == "gaussian":
        return gaussian_intensity(d.get("scale", 1.0),
                                  mean=tuple(d.get("mean", (0.0, 0.0))),
                                  eta=tuple(d.get("eta", (1.0, 1.0))),
                                  rho=d.get("rho", 0.0))
    raise ValueError(f"unknown intensity kind {kind!r}")


def parse_kernel(d):
    t = d["type"]
    if t == "gaussian":
        return GaussianKernel(d["sigma"])
    if t == "disk":
        return DiskKernel(d["sigma"])
    if t == "cauchy":
        return CauchyKernel(d["sigma"])
    if t == "vargamma":
        return VarGammaKernel(d["sigma"], d["nu"])
    raise ValueError(f"unknown kernel type {t!r}")


def parse_model(d, window: Window):
    """Build a model spec from its config dict."""
    t = d["type"]
    if t == "hom_poisson":
        return HomPoisson(d["lam"])
    if t == "inhom_poisson":
        return InhomPoisson(parse_intensity(d["intensity"], window))
    if t == "strauss":
        mcmc = McmcConfig(d.get("burn_in"))
        return Strauss(d["beta"], d["gamma"], d["range_R"], mcmc)
    if t == "cluster":
        kernel = parse_kernel(d["kernel"])
        buffer = d.get("buffer")
        parent = d["parent"]
        if isinstance(parent, dict):
            b = buffer if buffer is not None else kernel.default_buffer
            parent = parse_intensity(parent, window, window.expand(b))
        return Cluster(parent, d["offspring_mean"], kernel, buffer)
    if t == "lgcp":
        return LGCP(d["mu"], d["tau2"], d["scale"], d.get("grid_n", 64))
    raise ValueError(f"unknown model type {t!r}")


def resolve_model(name_or_dict, window: Window):
    """Resolve a model reference: a built-in name (hP, hP+, ihP, Str, ihT,
    F1..F6) or a config dict."""
    if isinstance(name_or_dict, dict):
        return parse_model(name_or_dict, window)
    name = str(name_or_dict)
    s1 = study1_models(window)
    if name in s1:
        return s1[name]
    s2 = study2_model_specs()
    if name in s2:
        return s2[name]
    raise ValueError(f"unknown model {name!r}")
