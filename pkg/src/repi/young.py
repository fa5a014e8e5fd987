"""Sharp Young's inequality and the classical Renyi entropy power inequalities.

Exponent triples live on the surface ``1/q + 1/r - 1/p = 1``.  The sharp
constant is Beckner's, written in the normalization

    ||f * g||_p <= C(p, q, r)**(d/2) ||f||_q ||g||_r,

so ``C = (A_q A_r A_p')**2`` with ``A_m = (m**(1/m) / m'**(1/m'))**(1/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from repi import kernels
from repi.convolution import convolve, weighted_combine
from repi.densities import AnalyticDensity, Gaussian, GridDensity, discretize, discretize_pair
from repi.errors import ConstraintError
from repi.renyi import renyi_entropy
from repi.report import EpiCheckCell, ExperimentReport, make_provenance

SURFACE_TOL = 1e-12
SCAN_RESOLUTION = 1e-4
GOLDEN = (math.sqrt(5) - 1) / 2


def _recip(x):
    return 0.0 if math.isinf(x) else 1.0 / x


@dataclass(frozen=True)
class YoungExponents:
    p: float
    q: float
    r: float

    def __post_init__(self):
        for name in ("p", "q", "r"):
            v = float(getattr(self, name))
            if not v >= 1:
                raise ConstraintError(f"{name} must be >= 1, got {v}")
            object.__setattr__(self, name, v)
        gap = self.inv_q + self.inv_r - self.inv_p - 1.0
        if abs(gap) > SURFACE_TOL:
            raise ConstraintError(f"1/q + 1/r - 1/p - 1 = {gap:.3e} for (p, q, r) = ({self.p}, {self.q}, {self.r})")

    @classmethod
    def from_u(cls, p: float, u: float) -> "YoungExponents":
        """Point on the surface with ``1/q = u`` and ``1/r = 1 + 1/p - u``."""
        inv_p = _recip(p)
        if not inv_p - 1e-15 <= u <= 1 + 1e-15:
            raise ConstraintError(f"1/q = {u} outside [1/p, 1] = [{inv_p}, 1]")
        u = min(max(u, inv_p), 1.0)
        v = 1.0 + inv_p - u
        return cls(p, math.inf if u == 0 else 1.0 / u, math.inf if v == 0 else 1.0 / v)

    @classmethod
    def symmetric(cls, p: float) -> "YoungExponents":
        q = 2 * p / (p + 1)
        return cls(p, q, q)

    @property
    def inv_p(self):
        return _recip(self.p)

    @property
    def inv_q(self):
        return _recip(self.q)

    @property
    def inv_r(self):
        return _recip(self.r)


def _log_beckner(theta):
    """``log A_m`` as a function of ``theta = 1/m``; zero at m = 1 and m = inf."""
    theta = np.asarray(theta, dtype=float)
    return 0.5 * (-special.xlogy(theta, theta) + special.xlogy(1 - theta, 1 - theta))


def log_sharp_young_constant(e: YoungExponents) -> float:
    return float(2 * (_log_beckner(e.inv_q) + _log_beckner(e.inv_r) + _log_beckner(1 - e.inv_p)))


def sharp_young_constant(e: YoungExponents) -> float:
    """Beckner's constant ``C(p, q, r)`` (equals 1 whenever any exponent is 1 or inf)."""
    return math.exp(log_sharp_young_constant(e))


def lp_norm(f: GridDensity, s: float) -> float:
    if math.isinf(s):
        return f.sup()
    return kernels.power_sum(f.values, f.weights, s) ** (1.0 / s)


def verify_norm_power_identity(f: GridDensity, s: float, d: int | None = None):
    """``(||f||_s, V_s(f)**(-(d/2)(1 - 1/s)))``, which should agree."""
    if not s > 1:
        raise ConstraintError(f"s must exceed 1, got {s}")
    d = f.dim if d is None else d
    h = renyi_entropy(f, s).value
    return lp_norm(f, s), math.exp(-(1 - 1 / s) * h)


def matched_gaussians(e: YoungExponents, total_variance: float = 1.0, dim: int = 1):
    """Gaussian pair attaining equality in sharp Young at ``e``.

    Variances split as ``1/q' : 1/r'``, which maximizes the Young ratio over
    centred Gaussians.
    """
    a, b = 1 - e.inv_q, 1 - e.inv_r
    if a <= 0 or b <= 0:
        raise ConstraintError("extremizers degenerate to point masses when q or r equals 1")
    s = a + b
    return (
        Gaussian(np.zeros(dim), total_variance * a / s),
        Gaussian(np.zeros(dim), total_variance * b / s),
    )


def young_norm_check(f: GridDensity, g: GridDensity, e: YoungExponents, *, method="fft",
                     combined: GridDensity | None = None) -> EpiCheckCell:
    """Sharp Young in norm form: lhs = C**(d/2) ||f||_q ||g||_r, rhs = ||f * g||_p."""
    z = convolve(f, g, method=method) if combined is None else combined
    d = f.dim
    lhs = math.exp(0.5 * d * log_sharp_young_constant(e)) * lp_norm(f, e.q) * lp_norm(g, e.r)
    rhs = lp_norm(z, e.p)
    return EpiCheckCell(
        "young_norm", lhs, rhs, p=e.p, family_x=f.label, family_y=g.label,
        n=int(max(f.spec.count)), extra={"q": e.q, "r": e.r, "C": sharp_young_constant(e)},
    )


def _log_vp(f, p):
    return 2.0 * renyi_entropy(f, p).value / f.dim


def verify_young_power_form(f: GridDensity, g: GridDensity, e: YoungExponents, alpha: float, *,
                            method="fft", combined: GridDensity | None = None) -> EpiCheckCell:
    """Young's inequality rewritten in entropy powers of order p.

    lhs = V_p(f*g)**alpha and
    rhs = C**(-alpha p/(p-1)) V_p(f)**(alpha p (q-1)/(q (p-1))) V_p(g)**(alpha p (r-1)/(r (p-1))).
    At p = q = r = 1 every exponent degenerates and the cell compares the L1
    masses instead (both sides 1).
    """
    z = convolve(f, g, method=method) if combined is None else combined
    if e.p == 1:
        lhs = z.mass()
        rhs = sharp_young_constant(e) * f.mass() * g.mass()
        log_l = math.log(lhs)
        log_r = math.log(rhs)
    else:
        k = alpha * e.p / (e.p - 1)
        log_l = alpha * _log_vp(z, e.p)
        log_r = (
            -k * log_sharp_young_constant(e)
            + k * (1 - e.inv_q) * _log_vp(f, e.p)
            + k * (1 - e.inv_r) * _log_vp(g, e.p)
        )
    return EpiCheckCell(
        "young_power", math.exp(log_l), math.exp(log_r), p=e.p, alpha=alpha,
        family_x=f.label, family_y=g.label, n=int(max(f.spec.count)),
        extra={"q": e.q, "r": e.r, "log_lhs": log_l, "log_rhs": log_r},
    )


def golden_section_max(fun, lo: float, hi: float, *, tol: float = 1e-13, maxiter: int = 200):
    """Maximize a unimodal scalar function on ``[lo, hi]``; returns ``(x, fun(x))``."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(maxiter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fun(d)
    x = (a + b) / 2
    return x, fun(x)


def lemma_log_objective(u, a: float, b: float, p: float, alpha: float):
    """``log F(u)`` with ``F = C**(-alpha p/(p-1)) a**lam b**(1-lam)``, ``lam = p (1-u)/(p-1)``.

    ``u = 1/q`` ranges over ``[1/p, 1]``; ``lam`` is ``p (q-1) / (q (p-1))``.
    """
    u = np.asarray(u, dtype=float)
    inv_p = 1.0 / p
    v = 1.0 + inv_p - u
    log_c = 2 * (_log_beckner(u) + _log_beckner(v) + _log_beckner(1 - inv_p))
    lam = np.clip(p * (1 - u) / (p - 1), 0.0, 1.0)
    return -alpha * p / (p - 1) * log_c + special.xlogy(lam, a) + special.xlogy(1 - lam, b)


def solve_exponents(a: float, b: float, p: float, *, alpha: float | None = None,
                    resolution: float = SCAN_RESOLUTION):
    """Search the exponent surface for the triple maximizing the scalar Young bound.

    Requires ``a + b = 1 - 1/p``.  A dense scan in ``u = 1/q`` over
    ``[1/p, 1]`` locates the maximum and golden-section search polishes it.
    Returns ``(YoungExponents, max F)``; the bound asks for ``max F >= 1 - 1/p``.
    """
    if not p > 1:
        raise ConstraintError(f"p must exceed 1 (feasible interval is empty), got {p}")
    if not (a > 0 and b > 0):
        raise ConstraintError(f"a and b must be positive, got a={a}, b={b}")
    target = 1 - 1 / p
    if abs(a + b - target) > 1e-10:
        raise ConstraintError(f"a + b = {a + b!r} but must equal 1 - 1/p = {target!r}")
    alpha = (p + 1) / 2 if alpha is None else alpha
    lo = 1.0 / p
    n = max(3, int(math.ceil((1 - lo) / resolution)) + 1)
    grid = np.linspace(lo, 1.0, n)
    vals = lemma_log_objective(grid, a, b, p, alpha)
    k = int(np.argmax(vals))
    best_u, best = float(grid[k]), float(vals[k])
    left, right = grid[max(k - 1, 0)], grid[min(k + 1, n - 1)]
    u, val = golden_section_max(lambda x: float(lemma_log_objective(x, a, b, p, alpha)), left, right)
    if val > best:
        best_u, best = u, val
    return YoungExponents.from_u(p, best_u), math.exp(best)


def verify_weighted_lemma(a_tilde: float, b_tilde: float, p: float, t: float, *, alpha: float | None = None):
    """Weighted version of :func:`solve_exponents` for ``a~ = t**alpha V_p**alpha(X)`` etc.

    The constraint ``a~ + b~ = 1 - 1/p`` and the search are unchanged; ``t``
    only has to be a valid weight.
    """
    if not 0 < t < 1:
        raise ConstraintError(f"weight t must lie in (0, 1), got {t}")
    return solve_exponents(a_tilde, b_tilde, p, alpha=alpha)


def _as_grids(f, g, n, shared):
    if isinstance(f, AnalyticDensity) and isinstance(g, AnalyticDensity):
        if shared:
            return discretize_pair(f, g, n=n)
        return discretize(f, n=n), discretize(g, n=n)
    f = f if isinstance(f, GridDensity) else discretize(f, n=n)
    g = g if isinstance(g, GridDensity) else discretize(g, n=n)
    return f, g


def _epi_sides(fg, gg, p, alpha, t, unweighted, identity_check, method):
    if unweighted:
        z = convolve(fg, gg, method=method)
        log_terms = [alpha * _log_vp(fg, p), alpha * _log_vp(gg, p)]
    else:
        z = weighted_combine(fg, gg, t, identity_check=identity_check, method=method)
        log_terms = []
        if t > 0:
            log_terms.append(alpha * (math.log(t) + _log_vp(fg, p)))
        if t < 1:
            log_terms.append(alpha * (math.log(1 - t) + _log_vp(gg, p)))
    lhs = math.exp(alpha * _log_vp(z, p))
    rhs = sum(math.exp(x) for x in log_terms)
    return lhs, rhs


def check_weighted_repi(f, g, p: float, alpha: float | None = None, t: float = 0.5, *, n: int = 4096,
                        unweighted: bool = False, identity_check: bool = False, theorem_mode: bool = True,
                        refine_below: float = math.inf, tol_rel: float = 1e-6, method: str = "fft",
                        experiment: str | None = None) -> EpiCheckCell:
    """Weighted Renyi EPI: ``V_p**a(sqrt(t)X + sqrt(1-t)Y) >= t**a V_p**a(X) + (1-t)**a V_p**a(Y)``.

    ``unweighted=True`` checks ``V_p**a(X+Y) >= V_p**a(X) + V_p**a(Y)`` instead.
    p = 1 with alpha = 1 is the Shannon EPI.  Analytic inputs are discretized
    with ``n`` nodes per axis; if the resulting ratio is below
    ``refine_below`` the check is repeated at ``2n`` and the ratio change
    becomes ``refinement_estimate``.
    """
    alpha = (p + 1) / 2 if alpha is None else float(alpha)
    if theorem_mode:
        if p < 1:
            raise ConstraintError(f"theorem mode needs p >= 1, got {p}")
        if p == 1 and alpha != 1:
            raise ConstraintError("Shannon mode (p = 1) uses alpha = 1")
        if p > 1 and alpha < (p + 1) / 2 - 1e-12:
            raise ConstraintError(f"alpha = {alpha} is below (p+1)/2 = {(p + 1) / 2}")
    if not unweighted and not (0 < t < 1 or (identity_check and t in (0, 1))):
        raise ConstraintError(f"weight t must lie in (0, 1), got {t}")
    analytic = isinstance(f, AnalyticDensity) and isinstance(g, AnalyticDensity)
    fg, gg = _as_grids(f, g, n, unweighted)
    lhs, rhs = _epi_sides(fg, gg, p, alpha, t, unweighted, identity_check, method)
    cell = EpiCheckCell(
        experiment or ("classical_unweighted" if unweighted else "classical_weighted"),
        lhs, rhs, p=p, alpha=alpha, t=None if unweighted else t,
        family_x=fg.label, family_y=gg.label, n=n, tol_rel=tol_rel,
    )
    if analytic and cell.ratio < refine_below:
        fg2, gg2 = _as_grids(f, g, 2 * n, unweighted)
        lhs2, rhs2 = _epi_sides(fg2, gg2, p, alpha, t, unweighted, identity_check, method)
        cell.refinement_estimate = abs(lhs2 / rhs2 - cell.ratio)
        cell.extra["ratio_2n"] = lhs2 / rhs2
    return cell


PINF_SCHEDULE = (4.0, 8.0, 16.0, 32.0)


def search_pinf_violation(pairs, mode: str = "alpha_one", *, n: int = 4096, schedule=PINF_SCHEDULE,
                          seed: int = 0) -> ExperimentReport:
    """Evaluate the unweighted EPI at p = inf (``alpha_one``) or along a p schedule.

    Exploratory: cells carry ratios but no pass/fail verdict.  ``pairs`` is a
    sequence of ``(f, g)`` analytic or grid densities.
    """
    if mode not in ("alpha_one", "alpha_schedule"):
        raise ValueError(f"unknown mode {mode!r}")
    cells = []
    for f, g in pairs:
        fg, gg = _as_grids(f, g, n, True)
        z = convolve(fg, gg)
        orders = [(math.inf, 1.0)] if mode == "alpha_one" else [(q, (q + 1) / 2) for q in schedule]
        for q, alpha in orders:
            lhs = math.exp(alpha * _log_vp(z, q))
            rhs = math.exp(alpha * _log_vp(fg, q)) + math.exp(alpha * _log_vp(gg, q))
            cells.append(EpiCheckCell(
                "pinf_search", lhs, rhs, p=q, alpha=alpha, family_x=fg.label, family_y=gg.label,
                n=n, exploratory=True, index=len(cells),
            ))
    config = {
        "experiment": "pinf_search",
        "mode": mode,
        "n": n,
        "schedule": list(schedule) if mode == "alpha_schedule" else [],
        "pairs": [[_describe(f), _describe(g)] for f, g in pairs],
    }
    return ExperimentReport(config, cells, make_provenance(seed))


def _describe(f):
    return f.to_spec() if isinstance(f, AnalyticDensity) else {"grid": f.label}
