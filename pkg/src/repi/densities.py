"""Probability densities on R^d (d = 1, 2): analytic families and grid samplings.

Grid values are point samples at the nodes ``origin + k * spacing``.  All
integrals use composite-trapezoid weights over the box, which coincide with the
plain Riemann sum whenever the density vanishes at the box faces.  Families
with a jump at the edge of their support (uniform, exponential) put that edge
on a box face so the jump costs O(spacing**2) instead of O(spacing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy import special

from repi.errors import DensityError, DivergentEntropyError, GridBudgetError

DEFAULT_BUDGET = 2**24
EPS_MASS = 1e-6
TRUNCATION_MASS = 1e-4
MIN_COUNT = 16

# half-widths of default boxes, in units of the family's scale parameter
GAUSSIAN_HALF_WIDTH = 10.0
LAPLACE_HALF_WIDTH = 25.0
EXPONENTIAL_WIDTH = 30.0
CAUCHY_HALF_WIDTH = 20.0


def _as_tuple(x, dim=None, cast=float):
    if np.ndim(x) == 0:
        vals = (cast(x),) * (dim or 1)
    else:
        vals = tuple(cast(v) for v in np.ravel(x))
    if dim is not None and len(vals) != dim:
        raise ValueError(f"expected {dim} values, got {len(vals)}")
    return vals


@dataclass(frozen=True)
class GridSpec:
    """Rectangular node lattice ``origin + k * spacing``, ``k = 0..count-1`` per axis."""

    origin: tuple
    spacing: tuple
    count: tuple
    budget: int = field(default=DEFAULT_BUDGET, compare=False)

    def __post_init__(self):
        origin = _as_tuple(self.origin)
        spacing = _as_tuple(self.spacing, len(origin))
        count = _as_tuple(self.count, len(origin), cast=int)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "count", count)
        if len(origin) not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {len(origin)}")
        if not all(math.isfinite(o) for o in origin):
            raise ValueError("origin must be finite")
        if not all(s > 0 and math.isfinite(s) for s in spacing):
            raise ValueError(f"spacing must be positive, got {spacing}")
        if any(n < MIN_COUNT for n in count):
            raise ValueError(f"each axis needs at least {MIN_COUNT} nodes, got {count}")
        if self.size > self.budget:
            raise GridBudgetError(f"grid of {self.size} cells exceeds budget {self.budget}")

    @classmethod
    def centered(cls, center, half_width, n, *, budget=DEFAULT_BUDGET):
        """``n`` nodes per axis on ``[c - w, c + w)`` with a node exactly at ``c``."""
        center = _as_tuple(center)
        dim = len(center)
        half_width = _as_tuple(half_width, dim)
        n = _as_tuple(n, dim, cast=int)
        spacing = tuple(2 * w / k for w, k in zip(half_width, n))
        origin = tuple(c - h * (k // 2) for c, h, k in zip(center, spacing, n))
        return cls(origin, spacing, n, budget)

    @classmethod
    def spanning(cls, low, high, n, *, budget=DEFAULT_BUDGET):
        """``n`` nodes per axis with the first and last node on ``low`` and ``high``."""
        low = _as_tuple(low)
        dim = len(low)
        high = _as_tuple(high, dim)
        n = _as_tuple(n, dim, cast=int)
        spacing = tuple((b - a) / (k - 1) for a, b, k in zip(low, high, n))
        return cls(low, spacing, n, budget)

    @classmethod
    def lattice(cls, low, high, spacing, anchor=None, *, budget=DEFAULT_BUDGET):
        """Nodes ``anchor + k * spacing`` covering ``[low, high]`` (anchor defaults to ``low``)."""
        low = _as_tuple(low)
        dim = len(low)
        high = _as_tuple(high, dim)
        spacing = _as_tuple(spacing, dim)
        anchor = low if anchor is None else _as_tuple(anchor, dim)
        origin, count = [], []
        for a, b, h, c in zip(low, high, spacing, anchor):
            k_lo = math.floor((c - a) / h + 1e-9)
            k_hi = math.floor((b - c) / h + 1e-9)
            n = k_lo + k_hi + 1
            if n < MIN_COUNT:
                extra = MIN_COUNT - n
                k_lo += extra // 2
                k_hi += extra - extra // 2
                n = MIN_COUNT
            origin.append(c - k_lo * h)
            count.append(n)
        return cls(tuple(origin), spacing, tuple(count), budget)

    @property
    def dim(self):
        return len(self.origin)

    @property
    def shape(self):
        return self.count

    @property
    def size(self):
        return int(np.prod(self.count))

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    @property
    def upper(self):
        return tuple(o + h * (n - 1) for o, h, n in zip(self.origin, self.spacing, self.count))

    def axes(self):
        return [o + h * np.arange(n) for o, h, n in zip(self.origin, self.spacing, self.count)]

    def points(self):
        """Node coordinates, shape ``count`` for d=1 and ``count + (2,)`` for d=2."""
        axes = self.axes()
        if self.dim == 1:
            return axes[0]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def weights(self):
        """Composite trapezoid weights, same shape as the grid."""
        per_axis = []
        for h, n in zip(self.spacing, self.count):
            w = np.full(n, h)
            w[0] = w[-1] = h / 2
            per_axis.append(w)
        if self.dim == 1:
            return per_axis[0]
        return np.multiply.outer(per_axis[0], per_axis[1])

    def edge_factors(self):
        """Trapezoid weights divided by the cell volume (1 inside, 1/2 on faces)."""
        return self.weights() / self.cell_volume


@dataclass(frozen=True)
class GridDensity:
    """Normalized density sampled on a :class:`GridSpec`."""

    spec: GridSpec
    values: np.ndarray
    mass_defect: float = 0.0
    truncation_flag: bool = False
    ringing: float = 0.0
    label: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.spec.shape:
            values = values.reshape(self.spec.shape)
        if not np.all(np.isfinite(values)):
            raise DensityError("density values must be finite")
        if np.any(values < 0):
            raise DensityError("density values must be non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_values(cls, spec, values, *, label="", truncation_flag=False, ringing=0.0):
        """Normalize raw samples to unit trapezoid mass."""
        values = np.asarray(values, dtype=float).reshape(spec.shape)
        if not np.all(np.isfinite(values)):
            raise DensityError(f"non-finite density value for {label or 'grid density'}")
        mass = float(np.sum(spec.weights() * values))
        if not mass > 0:
            raise DensityError(f"density {label!r} has no mass on the grid")
        return cls(spec, values / mass, abs(1.0 - mass), truncation_flag, ringing, label)

    @property
    def dim(self):
        return self.spec.dim

    @cached_property
    def weights(self):
        return self.spec.weights()

    def mass(self):
        return float(np.sum(self.weights * self.values))

    def sup(self):
        return float(self.values.max())

    def argmax_point(self):
        idx = np.unravel_index(int(np.argmax(self.values)), self.spec.shape)
        return tuple(o + h * i for o, h, i in zip(self.spec.origin, self.spec.spacing, idx))

    def interpolate(self, x):
        """Piecewise-linear evaluation; zero outside the box.

        ``x`` has shape ``(...)`` for d=1 and ``(..., 2)`` for d=2.
        """
        x = np.asarray(x, dtype=float)
        if self.dim == 1:
            return np.interp(x, self.spec.axes()[0], self.values, left=0.0, right=0.0)
        from scipy.interpolate import RegularGridInterpolator

        interp = RegularGridInterpolator(
            self.spec.axes(), self.values, method="linear", bounds_error=False, fill_value=0.0
        )
        return interp(x)


class AnalyticDensity:
    """Closed-form density family.  Subclasses fill in the methods below."""

    name = "analytic"
    dim = 1

    def pdf(self, x):
        raise NotImplementedError

    def mean(self):
        raise NotImplementedError

    def covariance(self):
        raise NotImplementedError

    def renyi(self, p):
        """Closed-form Renyi entropy in nats, or ``None`` when unavailable."""
        return None

    def sup(self):
        raise NotImplementedError

    def scaled(self, s):
        """Density of ``sqrt(s) * X``."""
        raise NotImplementedError

    def box(self):
        """``(low, high, centered)``: default support box per axis."""
        raise NotImplementedError

    def to_spec(self):
        raise NotImplementedError

    @property
    def label(self):
        args = ",".join(f"{k}={_fmt(v)}" for k, v in self.to_spec().items() if k != "family")
        return f"{self.name}({args})"

    def default_grid(self, n, spacing=None, *, budget=DEFAULT_BUDGET):
        low, high, centered = self.box()
        if spacing is not None:
            if centered:
                anchor = tuple((a + b) / 2 for a, b in zip(low, high))
            else:
                anchor = low
            return GridSpec.lattice(low, high, spacing, anchor, budget=budget)
        if centered:
            center = tuple((a + b) / 2 for a, b in zip(low, high))
            half = tuple((b - a) / 2 for a, b in zip(low, high))
            return GridSpec.centered(center, half, n, budget=budget)
        return GridSpec.spanning(low, high, n, budget=budget)

    def _points(self, x):
        x = np.asarray(x, dtype=float)
        if self.dim == 1:
            return x[..., None]
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected trailing axis of length {self.dim}")
        return x


def _fmt(v):
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt(x) for x in v) + "]"
    if isinstance(v, float):
        return f"{v:g}"
    return str(v)


def _check_order(p):
    """Shared guard for the order argument of closed forms."""
    if not p > 0:
        raise ValueError(f"Renyi order must be positive, got {p}")


class Gaussian(AnalyticDensity):
    name = "gaussian"

    def __init__(self, mean=0.0, cov=1.0):
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        cov = np.asarray(cov, dtype=float)
        if cov.ndim == 0:
            cov = np.eye(mean.size) * float(cov)
        elif cov.ndim == 1:
            cov = np.diag(cov)
        if cov.shape != (mean.size, mean.size):
            raise DensityError("covariance shape does not match mean")
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-12):
            raise DensityError("covariance must be symmetric")
        if np.linalg.eigvalsh(cov).min() <= 0:
            raise DensityError("covariance must be positive definite")
        if mean.size not in (1, 2):
            raise DensityError("only d = 1, 2 are supported")
        self._mean = mean
        self._cov = cov
        self.dim = mean.size
        self._inv = np.linalg.inv(cov)
        self._logdet = float(np.linalg.slogdet(cov)[1])

    @classmethod
    def isotropic(cls, sigma=1.0, dim=1, mean=0.0):
        return cls(np.full(dim, mean, dtype=float), sigma**2)

    def pdf(self, x):
        z = self._points(x) - self._mean
        quad = np.einsum("...i,ij,...j->...", z, self._inv, z)
        return np.exp(-0.5 * quad - 0.5 * (self.dim * math.log(2 * math.pi) + self._logdet))

    def mean(self):
        return self._mean.copy()

    def covariance(self):
        return self._cov.copy()

    def renyi(self, p):
        _check_order(p)
        base = 0.5 * (self.dim * math.log(2 * math.pi) + self._logdet)
        if p == 1:
            return base + 0.5 * self.dim
        if math.isinf(p):
            return base
        return base + self.dim * math.log(p) / (2 * (p - 1))

    def sup(self):
        return math.exp(-0.5 * (self.dim * math.log(2 * math.pi) + self._logdet))

    def scaled(self, s):
        return Gaussian(math.sqrt(s) * self._mean, s * self._cov)

    def box(self):
        sd = np.sqrt(np.diag(self._cov))
        w = GAUSSIAN_HALF_WIDTH * sd
        return tuple(self._mean - w), tuple(self._mean + w), True

    def to_spec(self):
        if self.dim == 1:
            return {"family": "gaussian", "mean": float(self._mean[0]), "sigma": math.sqrt(self._cov[0, 0])}
        return {"family": "gaussian", "mean": self._mean.tolist(), "cov": self._cov.tolist()}


class Uniform(AnalyticDensity):
    name = "uniform"

    def __init__(self, low=0.0, high=1.0):
        low = np.atleast_1d(np.asarray(low, dtype=float))
        high = np.atleast_1d(np.asarray(high, dtype=float))
        if low.shape != high.shape or low.size not in (1, 2):
            raise DensityError("low/high must have matching length 1 or 2")
        if np.any(high <= low):
            raise DensityError("uniform box must have positive width")
        self.low, self.high = low, high
        self.dim = low.size
        self.volume = float(np.prod(high - low))

    def pdf(self, x):
        z = self._points(x)
        inside = np.all((z >= self.low) & (z <= self.high), axis=-1)
        return np.where(inside, 1.0 / self.volume, 0.0)

    def mean(self):
        return (self.low + self.high) / 2

    def covariance(self):
        return np.diag((self.high - self.low) ** 2 / 12)

    def renyi(self, p):
        _check_order(p)
        return math.log(self.volume)

    def sup(self):
        return 1.0 / self.volume

    def scaled(self, s):
        r = math.sqrt(s)
        return Uniform(r * self.low, r * self.high)

    def box(self):
        return tuple(self.low), tuple(self.high), False

    def to_spec(self):
        if self.dim == 1:
            return {"family": "uniform", "low": float(self.low[0]), "high": float(self.high[0])}
        return {"family": "uniform", "low": self.low.tolist(), "high": self.high.tolist()}


class Exponential(AnalyticDensity):
    name = "exponential"

    def __init__(self, rate=1.0):
        if not rate > 0:
            raise DensityError("exponential rate must be positive")
        self.rate = float(rate)

    def pdf(self, x):
        z = self._points(x)[..., 0]
        return np.where(z >= 0, self.rate * np.exp(-self.rate * np.maximum(z, 0.0)), 0.0)

    def mean(self):
        return np.array([1.0 / self.rate])

    def covariance(self):
        return np.array([[1.0 / self.rate**2]])

    def renyi(self, p):
        _check_order(p)
        if p == 1:
            return 1.0 - math.log(self.rate)
        if math.isinf(p):
            return -math.log(self.rate)
        return -math.log(self.rate) + math.log(p) / (p - 1)

    def sup(self):
        return self.rate

    def scaled(self, s):
        return Exponential(self.rate / math.sqrt(s))

    def box(self):
        return (0.0,), (EXPONENTIAL_WIDTH / self.rate,), False

    def to_spec(self):
        return {"family": "exponential", "rate": self.rate}


class Laplace(AnalyticDensity):
    """Product of ``dim`` iid Laplace(loc, scale) coordinates."""

    name = "laplace"

    def __init__(self, scale=1.0, loc=0.0, dim=1):
        if not scale > 0:
            raise DensityError("laplace scale must be positive")
        if dim not in (1, 2):
            raise DensityError("only d = 1, 2 are supported")
        self.scale = float(scale)
        self.loc = float(loc)
        self.dim = dim

    def pdf(self, x):
        z = np.abs(self._points(x) - self.loc).sum(axis=-1)
        return np.exp(-z / self.scale) / (2 * self.scale) ** self.dim

    def mean(self):
        return np.full(self.dim, self.loc)

    def covariance(self):
        return np.eye(self.dim) * 2 * self.scale**2

    def renyi(self, p):
        _check_order(p)
        base = math.log(2 * self.scale)
        if p == 1:
            return self.dim * (1.0 + base)
        if math.isinf(p):
            return self.dim * base
        return self.dim * (base + math.log(p) / (p - 1))

    def sup(self):
        return (2 * self.scale) ** -self.dim

    def scaled(self, s):
        r = math.sqrt(s)
        return Laplace(self.scale * r, self.loc * r, self.dim)

    def box(self):
        w = LAPLACE_HALF_WIDTH * self.scale
        return (self.loc - w,) * self.dim, (self.loc + w,) * self.dim, True

    def to_spec(self):
        spec = {"family": "laplace", "scale": self.scale, "loc": self.loc}
        if self.dim != 1:
            spec["dim"] = self.dim
        return spec


class Cauchy(AnalyticDensity):
    """Cauchy(loc, scale).  Its default box always truncates the tails."""

    name = "cauchy"

    def __init__(self, scale=1.0, loc=0.0, half_width=CAUCHY_HALF_WIDTH):
        if not scale > 0:
            raise DensityError("cauchy scale must be positive")
        self.scale = float(scale)
        self.loc = float(loc)
        self.half_width = float(half_width)

    def pdf(self, x):
        z = (self._points(x)[..., 0] - self.loc) / self.scale
        return 1.0 / (math.pi * self.scale * (1 + z * z))

    def mean(self):
        return np.array([np.nan])

    def covariance(self):
        return np.array([[np.inf]])

    def renyi(self, p):
        _check_order(p)
        if p == 1:
            return math.log(4 * math.pi * self.scale)
        if math.isinf(p):
            return math.log(math.pi * self.scale)
        if p <= 0.5:
            raise DivergentEntropyError(f"Cauchy Renyi integral diverges for p = {p} <= 1/2")
        # int (1 + y^2)^-p dy = sqrt(pi) Gamma(p - 1/2) / Gamma(p)
        log_int = (
            -p * math.log(math.pi * self.scale)
            + math.log(self.scale)
            + 0.5 * math.log(math.pi)
            + special.gammaln(p - 0.5)
            - special.gammaln(p)
        )
        return log_int / (1 - p)

    def sup(self):
        return 1.0 / (math.pi * self.scale)

    def scaled(self, s):
        r = math.sqrt(s)
        return Cauchy(self.scale * r, self.loc * r, self.half_width)

    def box(self):
        w = self.half_width * self.scale
        return (self.loc - w,), (self.loc + w,), True

    def to_spec(self):
        return {"family": "cauchy", "scale": self.scale, "loc": self.loc}


class FiniteMixture(AnalyticDensity):
    name = "mixture"

    def __init__(self, components: Sequence[AnalyticDensity], weights):
        components = list(components)
        weights = np.asarray(weights, dtype=float)
        if not components or weights.shape != (len(components),):
            raise DensityError("mixture needs one weight per component")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise DensityError("mixture weights must lie on the simplex")
        dims = {c.dim for c in components}
        if len(dims) != 1:
            raise DensityError("mixture components must share a dimension")
        self.components = components
        self.weights = weights
        self.dim = dims.pop()

    def pdf(self, x):
        return sum(w * c.pdf(x) for w, c in zip(self.weights, self.components))

    def mean(self):
        return sum(w * c.mean() for w, c in zip(self.weights, self.components))

    def covariance(self):
        m = self.mean()
        second = sum(
            w * (c.covariance() + np.outer(c.mean(), c.mean())) for w, c in zip(self.weights, self.components)
        )
        return second - np.outer(m, m)

    def sup(self):
        raise NotImplementedError("mixture sup has no closed form; discretize instead")

    def scaled(self, s):
        return FiniteMixture([c.scaled(s) for c in self.components], self.weights)

    def box(self):
        boxes = [c.box() for c in self.components]
        low = tuple(min(b[0][i] for b in boxes) for i in range(self.dim))
        high = tuple(max(b[1][i] for b in boxes) for i in range(self.dim))
        return low, high, True

    def to_spec(self):
        return {
            "family": "mixture",
            "components": [c.to_spec() for c in self.components],
            "weights": self.weights.tolist(),
        }

    @property
    def label(self):
        return "+".join(f"{_fmt(w)}*{c.label}" for w, c in zip(self.weights, self.components))


def family_from_spec(spec):
    """Build an :class:`AnalyticDensity` from a mapping such as ``{"family": "gaussian", "sigma": 2}``."""
    if isinstance(spec, AnalyticDensity):
        return spec
    spec = dict(spec)
    kind = str(spec.pop("family", "")).lower()
    try:
        if kind == "gaussian":
            if "cov" in spec:
                return Gaussian(spec.get("mean", 0.0), spec["cov"])
            sigma = float(spec.get("sigma", 1.0))
            dim = int(spec.get("dim", 1))
            mean = spec.get("mean", 0.0)
            return Gaussian(np.broadcast_to(np.asarray(mean, dtype=float), (dim,)), sigma**2)
        if kind == "uniform":
            return Uniform(spec.get("low", 0.0), spec.get("high", 1.0))
        if kind == "exponential":
            return Exponential(float(spec.get("rate", 1.0)))
        if kind == "laplace":
            return Laplace(float(spec.get("scale", 1.0)), float(spec.get("loc", 0.0)), int(spec.get("dim", 1)))
        if kind == "cauchy":
            return Cauchy(
                float(spec.get("scale", 1.0)),
                float(spec.get("loc", 0.0)),
                float(spec.get("half_width", CAUCHY_HALF_WIDTH)),
            )
        if kind == "mixture":
            comps = [family_from_spec(c) for c in spec["components"]]
            return FiniteMixture(comps, spec["weights"])
    except KeyError as exc:
        raise DensityError(f"{kind} spec is missing {exc}") from None
    raise DensityError(f"unknown density family {kind!r}")


def discretize(src: AnalyticDensity, spec: GridSpec | None = None, *, n: int = 4096) -> GridDensity:
    """Sample ``src`` on ``spec`` (default: the family's own box with ``n`` nodes per axis)."""
    if spec is None:
        spec = src.default_grid(n)
    if spec.dim != src.dim:
        raise DensityError(f"grid dimension {spec.dim} does not match density dimension {src.dim}")
    with np.errstate(all="ignore"):
        values = src.pdf(spec.points())
    if not np.all(np.isfinite(values)):
        raise DensityError(f"non-finite value while sampling {src.label}")
    raw_mass = float(np.sum(spec.weights() * values))
    truncated = raw_mass < 1.0 - TRUNCATION_MASS
    return GridDensity.from_values(spec, values, label=src.label, truncation_flag=truncated)


def discretize_pair(f: AnalyticDensity, g: AnalyticDensity, *, n: int = 4096):
    """Sample two densities on lattices with a shared spacing (the finer default)."""
    if f.dim != g.dim:
        raise DensityError(f"dimension mismatch: {f.dim} vs {g.dim}")
    gf, gg = f.default_grid(n), g.default_grid(n)
    spacing = tuple(min(a, b) for a, b in zip(gf.spacing, gg.spacing))
    return (
        discretize(f, f.default_grid(n, spacing)),
        discretize(g, g.default_grid(n, spacing)),
    )


def scale_density(f: GridDensity, s: float, *, spacing=None) -> GridDensity:
    """Density of ``sqrt(s) * X`` for ``X ~ f``: ``x -> s**(-d/2) f(x / sqrt(s))``.

    Without ``spacing`` the node lattice itself is stretched by ``sqrt(s)``,
    which is exact.  With ``spacing`` the result is resampled by linear
    interpolation onto a lattice of that spacing anchored at the image of
    ``f``'s maximum.
    """
    if not s > 0:
        raise ValueError(f"scale factor must be positive, got {s}")
    r = math.sqrt(s)
    spec = f.spec
    exact_spacing = tuple(r * h for h in spec.spacing)
    label = f"sqrt({s:g})*{f.label}" if f.label else ""
    if spacing is not None:
        spacing = _as_tuple(spacing, spec.dim)
        if all(math.isclose(a, b, rel_tol=1e-12) for a, b in zip(spacing, exact_spacing)):
            spacing = None
    if spacing is None:
        new_spec = GridSpec(tuple(r * o for o in spec.origin), exact_spacing, spec.count, spec.budget)
        values = f.values * s ** (-spec.dim / 2)
    else:
        low = tuple(r * o for o in spec.origin)
        high = tuple(r * u for u in spec.upper)
        anchor = tuple(r * a for a in f.argmax_point())
        new_spec = GridSpec.lattice(low, high, spacing, anchor, budget=spec.budget)
        values = f.interpolate(new_spec.points() / r) * s ** (-spec.dim / 2)
    out = GridDensity.from_values(new_spec, values, label=label, truncation_flag=f.truncation_flag)
    return out


def mean_and_covariance(f: GridDensity):
    """Trapezoid-rule mean vector and covariance matrix of a grid density."""
    w = f.weights * f.values
    pts = f.spec.points()
    if f.dim == 1:
        pts = pts[..., None]
    flat_w = w.reshape(-1)
    flat_x = pts.reshape(-1, f.dim)
    mass = flat_w.sum()
    mean = flat_w @ flat_x / mass
    centered = flat_x - mean
    cov = (centered * flat_w[:, None]).T @ centered / mass
    if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
        raise DensityError("non-finite moment accumulation")
    return mean, cov
