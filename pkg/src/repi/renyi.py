"""Renyi entropies H_p and entropy powers V_p, in nats, for p in (0, inf]."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from repi import kernels
from repi.densities import AnalyticDensity, GridDensity, GridSpec, discretize
from repi.errors import DensityError, DivergentEntropyError

DEFAULT_N = {1: 8192, 2: 1024}


class OrderClass(enum.Enum):
    SUB1 = "sub1"
    SHANNON = "shannon"
    SUPER1 = "super1"
    INFINITY = "infinity"


@dataclass(frozen=True)
class RenyiOrder:
    p: float

    def __post_init__(self):
        p = float(self.p)
        if not p > 0 or math.isnan(p):
            raise ValueError(f"Renyi order must be positive, got {self.p}")
        object.__setattr__(self, "p", p)

    @classmethod
    def of(cls, p) -> "RenyiOrder":
        if isinstance(p, RenyiOrder):
            return p
        if isinstance(p, str):
            p = math.inf if p.strip().lower() in ("inf", "infinity", "∞") else float(p)
        return cls(float(p))

    @property
    def kind(self) -> OrderClass:
        if math.isinf(self.p):
            return OrderClass.INFINITY
        if self.p == 1:
            return OrderClass.SHANNON
        return OrderClass.SUB1 if self.p < 1 else OrderClass.SUPER1

    def __str__(self):
        return "inf" if math.isinf(self.p) else f"{self.p:g}"


@dataclass(frozen=True)
class EntropyValue:
    value: float
    order: RenyiOrder
    dim: int
    truncated: bool = False

    def __float__(self):
        return float(self.value)


def _grid_entropy(f: GridDensity, order: RenyiOrder) -> float:
    kind = order.kind
    if kind is OrderClass.INFINITY:
        return -math.log(f.sup())
    if kind is OrderClass.SHANNON:
        return -kernels.xlogx_sum(f.values, f.weights)
    integral = kernels.power_sum(f.values, f.weights, order.p)
    if not (integral > 0 and math.isfinite(integral)):
        raise DensityError(f"power integral is {integral} at p = {order.p}")
    return math.log(integral) / (1.0 - order.p)


def renyi_entropy(f: GridDensity | AnalyticDensity, p, *, n: int | None = None) -> EntropyValue:
    """Renyi entropy ``H_p = log(int f**p) / (1 - p)`` in nats.

    p = 1 is the Shannon entropy ``-int f log f`` and p = inf is
    ``-log max f``.  Analytic densities use their closed form when one exists
    and are otherwise discretized on their default box (``n`` nodes per axis).
    A grid flagged as truncated marks the result as truncated; sub-1 orders are
    the ones sensitive to the missing tails.
    """
    order = RenyiOrder.of(p)
    if isinstance(f, AnalyticDensity):
        closed = f.renyi(order.p)
        if closed is not None:
            return EntropyValue(float(closed), order, f.dim)
        f = discretize(f, n=n or DEFAULT_N[f.dim])
    return EntropyValue(_grid_entropy(f, order), order, f.dim, truncated=f.truncation_flag)


def entropy_power(f, p, d: int | None = None, *, n: int | None = None) -> float:
    """``V_p = exp((2/d) H_p)``."""
    h = renyi_entropy(f, p, n=n)
    d = h.dim if d is None else d
    return math.exp(2.0 * h.value / d)


def shannon_limit_check(f, eps: float, *, n: int | None = None):
    """Return ``(H_{1-eps}, H_1, H_{1+eps})`` for comparing the p -> 1 limit."""
    if not 0 < eps <= 0.1:
        raise ValueError(f"eps must lie in (0, 0.1], got {eps}")
    if isinstance(f, AnalyticDensity) and f.renyi(1.0) is None:
        f = discretize(f, n=n or DEFAULT_N[f.dim])
    return tuple(renyi_entropy(f, q, n=n) for q in (1 - eps, 1.0, 1 + eps))


def harmonic_energy(spec: GridSpec) -> np.ndarray:
    """``(q**2 + p**2) / 2`` on a 2-D phase-space grid."""
    pts = spec.points()
    return 0.5 * np.sum(pts**2, axis=-1)


def partition_function(energy: np.ndarray, spec: GridSpec, temperature: float) -> float:
    """``Z(T) = int exp(-E/T)`` by trapezoid quadrature (Boltzmann constant 1)."""
    e0 = float(energy.min())
    return math.exp(_log_partition(energy, spec.weights(), temperature, e0))


def _log_partition(energy, weights, temperature, e0):
    return -e0 / temperature + math.log(float(np.sum(weights * np.exp(-(energy - e0) / temperature))))


def reference_temperature(energy: np.ndarray, spec: GridSpec, *, t_min=1e-6, t_max=1e6) -> float:
    """Solve ``Z(T0) = 1`` for ``T0``."""
    w = spec.weights()
    e0 = float(energy.min())

    def log_z(log_t):
        return _log_partition(energy, w, math.exp(log_t), e0)

    lo, hi = math.log(t_min), math.log(t_max)
    f_lo, f_hi = log_z(lo), log_z(hi)
    if not (f_lo < 0 < f_hi):
        raise ValueError(f"Z(T0) = 1 is not bracketed on T in [{t_min:g}, {t_max:g}]: log Z = ({f_lo:g}, {f_hi:g})")
    return math.exp(optimize.brentq(log_z, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))


def thermo_renyi_check(energy: np.ndarray, spec: GridSpec, temperature: float, *, tol: float = 1e-12):
    """Both sides of the free-energy identity ``H_{T0/T} = -F(T) / (T - T0)``.

    ``energy`` is a Hamiltonian sampled on a 2-D phase-space grid.  T0 is fixed
    by ``Z(T0) = 1``, so ``p0 = exp(-E/T0)`` is a normalized density; its Renyi
    entropy of order T0/T is compared with ``-F(T)/(T - T0)`` where
    ``F(T) = -T log Z(T)``.  Returns ``(renyi_side, free_energy_side)``.
    """
    energy = np.asarray(energy, dtype=float)
    if energy.shape != spec.shape:
        raise ValueError("energy grid does not match spec")
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    t0 = reference_temperature(energy, spec)
    if abs(temperature - t0) <= tol * t0:
        raise ValueError("order T0/T = 1 is degenerate")
    reference = GridDensity.from_values(spec, np.exp(-energy / t0), label=f"gibbs(T0={t0:.6g})")
    renyi_side = renyi_entropy(reference, t0 / temperature).value
    free_energy = -temperature * math.log(partition_function(energy, spec, temperature))
    return renyi_side, -free_energy / (temperature - t0)


__all__ = [
    "OrderClass",
    "RenyiOrder",
    "EntropyValue",
    "renyi_entropy",
    "entropy_power",
    "shannon_limit_check",
    "harmonic_energy",
    "partition_function",
    "reference_temperature",
    "thermo_renyi_check",
    "DivergentEntropyError",
]
