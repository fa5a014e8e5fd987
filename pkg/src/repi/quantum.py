"""Bosonic Gaussian states: symplectic spectra, Renyi entropies, beam-splitter mixing.

Conventions: quadratures ordered (x1, p1, ..., xD, pD); the vacuum has
covariance equal to the identity, so physical states have every symplectic
eigenvalue >= 1 and a thermal mode with mean photon number n has nu = 2n + 1.
The entropy power of a D-mode state is ``V_p = exp(H_p / D)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from repi.errors import ConstraintError, StateError
from repi.report import EpiCheckCell

UNCERTAINTY_TOL = 1e-9
SYMMETRY_TOL = 1e-12
ENTROPY_POWER_CONVENTION = "exp(H_p/D)"


def symplectic_form(modes: int) -> np.ndarray:
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _check_covariance(cov) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
        raise StateError(f"covariance must be a 2D x 2D matrix, got shape {cov.shape}")
    if not np.all(np.isfinite(cov)):
        raise StateError("covariance has non-finite entries")
    scale = max(1.0, float(np.abs(cov).max()))
    if np.abs(cov - cov.T).max() > SYMMETRY_TOL * scale:
        raise StateError("covariance is not symmetric")
    return (cov + cov.T) / 2


def symplectic_eigenvalues(cov) -> np.ndarray:
    """Moduli of the eigenvalues of ``i Omega cov``, one per mode, ascending.

    Computed as the spectrum of the Hermitian matrix ``i S Omega S`` with
    ``S = cov**(1/2)``, which is similar to ``i Omega cov``.
    """
    cov = _check_covariance(cov)
    w, v = np.linalg.eigh(cov)
    if w.min() <= 0:
        raise StateError("covariance must be positive definite")
    root = (v * np.sqrt(w)) @ v.T
    herm = 1j * (root @ symplectic_form(cov.shape[0] // 2) @ root)
    ev = np.linalg.eigvalsh(herm)
    return np.sort(ev[ev.size // 2:])


@dataclass(frozen=True)
class GaussianQuantumState:
    mean: np.ndarray
    cov: np.ndarray
    label: str = ""

    def __post_init__(self):
        cov = _check_covariance(self.cov)
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        if mean.size != cov.shape[0]:
            raise StateError(f"mean has length {mean.size}, covariance is {cov.shape}")
        nu = symplectic_eigenvalues(cov)
        if nu.min() < 1 - UNCERTAINTY_TOL:
            raise StateError(f"symplectic eigenvalue {nu.min():.12g} < 1 violates the uncertainty relation")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def modes(self) -> int:
        return self.cov.shape[0] // 2

    def symplectic_eigenvalues(self):
        return symplectic_eigenvalues(self.cov)

    def describe(self) -> str:
        if self.label:
            return self.label
        nu = ",".join(f"{v:.6g}" for v in self.symplectic_eigenvalues())
        return f"gaussian_state(D={self.modes};nu=[{nu}])"

    @classmethod
    def vacuum(cls, modes: int = 1):
        return cls(np.zeros(2 * modes), np.eye(2 * modes), label=f"vacuum(D={modes})")

    @classmethod
    def thermal(cls, nu: float, modes: int = 1):
        """Thermal state with symplectic eigenvalue ``nu = 2 n + 1`` on every mode."""
        return cls(np.zeros(2 * modes), nu * np.eye(2 * modes), label=f"thermal(nu={nu:g},D={modes})")

    @classmethod
    def squeezed_vacuum(cls, r: float):
        return cls(np.zeros(2), np.diag([math.exp(2 * r), math.exp(-2 * r)]), label=f"squeezed(r={r:g})")


def _log_renyi_term(nu: np.ndarray, p: float) -> np.ndarray:
    """``log(((nu+1)**p - (nu-1)**p) / 2**p)``, stable for large p and nu near 1."""
    nu = np.maximum(nu, 1.0)
    return p * np.log((nu + 1) / 2) + np.log1p(-(((nu - 1) / (nu + 1)) ** p))


def quantum_renyi_entropy(state: GaussianQuantumState, p: float) -> float:
    """``H_p = (1/(1-p)) sum_k log(2**p / ((nu_k+1)**p - (nu_k-1)**p))`` for p > 1."""
    if not p > 1:
        raise ConstraintError(f"quantum Renyi order must exceed 1, got {p}")
    nu = state.symplectic_eigenvalues()
    if math.isinf(p):
        return float(np.sum(np.log((np.maximum(nu, 1.0) + 1) / 2)))
    return float(np.sum(_log_renyi_term(nu, p)) / (p - 1))


def quantum_entropy_power(state: GaussianQuantumState, p: float, kappa: float = 1.0) -> float:
    """``V_p(rho)**kappa`` with ``V_p = exp(H_p / D)``."""
    return math.exp(kappa * quantum_renyi_entropy(state, p) / state.modes)


def beamsplitter_convolve(x: GaussianQuantumState, y: GaussianQuantumState, tau: float, *,
                          boundary_check: bool = False) -> GaussianQuantumState:
    """Output mode of a beam splitter with transmissivity ``tau`` fed by ``x`` and ``y``.

    Covariances mix as ``tau cov_x + (1 - tau) cov_y`` and means as
    ``sqrt(tau) mean_x + sqrt(1 - tau) mean_y``.
    """
    if x.modes != y.modes:
        raise StateError(f"mode mismatch: {x.modes} vs {y.modes}")
    if boundary_check and tau in (0, 1):
        return x if tau == 1 else y
    if not 0 < tau < 1:
        raise ConstraintError(f"transmissivity must lie in (0, 1), got {tau}")
    cov = tau * x.cov + (1 - tau) * y.cov
    mean = math.sqrt(tau) * x.mean + math.sqrt(1 - tau) * y.mean
    return GaussianQuantumState(mean, cov)


@dataclass(frozen=True)
class QuantumOrderParams:
    p: float
    kappa: float | None = None
    theorem_mode: bool = True

    def __post_init__(self):
        if not self.p > 1:
            raise ConstraintError(f"p must exceed 1, got {self.p}")
        kappa = (self.p + 1) / 2 if self.kappa is None else float(self.kappa)
        if self.theorem_mode and kappa < (self.p + 1) / 2 - 1e-12:
            raise ConstraintError(f"kappa = {kappa} is below (p+1)/2 = {(self.p + 1) / 2}")
        object.__setattr__(self, "kappa", kappa)


def check_qrepi(x: GaussianQuantumState, y: GaussianQuantumState, tau: float, params: QuantumOrderParams, *,
                tol_rel: float = 1e-6, boundary_check: bool = False) -> EpiCheckCell:
    """``V_p**k(x [+]_tau y) >= tau**k V_p**k(x) + (1-tau)**k V_p**k(y)``."""
    p, kappa = params.p, params.kappa
    z = beamsplitter_convolve(x, y, tau, boundary_check=boundary_check)
    lhs = quantum_entropy_power(z, p, kappa)
    rhs = 0.0
    if tau > 0:
        rhs += tau**kappa * quantum_entropy_power(x, p, kappa)
    if tau < 1:
        rhs += (1 - tau) ** kappa * quantum_entropy_power(y, p, kappa)
    return EpiCheckCell(
        "quantum", lhs, rhs, p=p, alpha=kappa, t=tau, family_x=x.describe(), family_y=y.describe(),
        tol_rel=tol_rel, extra={"modes": x.modes, "entropy_power": ENTROPY_POWER_CONVENTION},
    )


def _passive_symplectic(modes: int, rng: np.random.Generator) -> np.ndarray:
    if modes == 1:
        theta = rng.uniform(0, 2 * math.pi)
        u = np.array([[np.exp(1j * theta)]])
    else:
        u = unitary_group.rvs(modes, random_state=rng)
    # real form in (x..., p...) ordering, then permute to (x1, p1, ...)
    block = np.block([[u.real, -u.imag], [u.imag, u.real]])
    perm = np.ravel(np.column_stack([np.arange(modes), np.arange(modes) + modes]))
    return block[np.ix_(perm, perm)]


def random_symplectic(modes: int, rng: np.random.Generator, max_squeeze: float = 1.5) -> np.ndarray:
    """Passive rotation, single-mode squeezers with ``|r| <= max_squeeze``, passive rotation."""
    r = rng.uniform(-max_squeeze, max_squeeze, size=modes)
    squeeze = np.diag(np.ravel(np.column_stack([np.exp(-r), np.exp(r)])))
    return _passive_symplectic(modes, rng) @ squeeze @ _passive_symplectic(modes, rng)


def random_gaussian_state(modes: int, seed: int, temperature_scale: float = 1.0, *,
                          max_squeeze: float = 1.5, return_spectrum: bool = False):
    """Seeded random valid state ``S diag(nu) S^T`` with ``nu_k = 1 + Exp(temperature_scale)``."""
    if modes not in (1, 2):
        raise ValueError(f"modes must be 1 or 2, got {modes}")
    if temperature_scale < 0:
        raise ValueError("temperature_scale must be non-negative")
    rng = np.random.default_rng(seed)
    if temperature_scale > 0:
        nu = 1.0 + rng.exponential(temperature_scale, size=modes)
    else:
        nu = np.ones(modes)
    s = random_symplectic(modes, rng, max_squeeze)
    cov = s @ np.diag(np.repeat(nu, 2)) @ s.T
    cov = (cov + cov.T) / 2
    mean = rng.normal(size=2 * modes)
    state = GaussianQuantumState(mean, cov)
    if return_spectrum:
        return state, np.sort(nu)
    return state
