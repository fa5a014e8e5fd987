"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a single ``PASS``/``FAIL`` line (printed immediately and
again in the pytest terminal summary) before asserting.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from repi.densities import Exponential, Gaussian, Laplace, Uniform, discretize, scale_density
from repi.densities import GridSpec
from repi.harness import SweepConfig, emit_report, load_config, run_sweep
from repi.quantum import GaussianQuantumState, QuantumOrderParams, check_qrepi, quantum_entropy_power, quantum_renyi_entropy
from repi.renyi import harmonic_energy, reference_temperature, renyi_entropy, thermo_renyi_check
from repi.young import (
    YoungExponents,
    check_weighted_repi,
    matched_gaussians,
    search_pinf_violation,
    young_norm_check,
)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
INF = math.inf


def verdict(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def oracle(name, p):
    """Closed-form H_p in nats for the four reference densities."""
    if name == "uniform":
        return 0.0
    if name == "gaussian":
        base, shannon = 0.5 * math.log(2 * math.pi), 0.5
        scale = 0.5
    elif name == "laplace":
        base, shannon, scale = math.log(2.0), 1.0, 1.0
    else:
        base, shannon, scale = 0.0, 1.0, 1.0
    if math.isinf(p):
        return base
    if p == 1:
        return base + shannon
    return base + scale * math.log(p) / (p - 1)


def test_criterion_01_closed_form_entropy():
    start = time.perf_counter()
    families = {"gaussian": Gaussian(0, 1), "uniform": Uniform(0, 1), "laplace": Laplace(1.0), "exponential": Exponential(1.0)}
    worst = 0.0
    for name, fam in families.items():
        grid = discretize(fam, n=8192)
        for p in (0.5, 1.0, 2.0, 3.0, INF):
            worst = max(worst, abs(renyi_entropy(grid, p).value - oracle(name, p)))
    elapsed = time.perf_counter() - start
    verdict(1, worst < 1e-5 and elapsed < 5, f"max |H_grid - H_exact| = {worst:.2e} (< 1e-5), {elapsed:.2f} s (< 5 s)")


def test_criterion_02_scaling_identity():
    worst = 0.0
    for d, n in ((1, 8192), (2, 512)):
        for fam in (Gaussian(np.zeros(d), 1.0), Laplace(1.0, dim=d)):
            f = discretize(fam, n=n)
            for t in (0.25, 0.5, 2.0, 4.0):
                g = scale_density(f, t)
                for p in (1.0, 2.0, 3.0):
                    diff = renyi_entropy(g, p).value - renyi_entropy(f, p).value - 0.5 * d * math.log(t)
                    worst = max(worst, abs(diff))
    verdict(2, worst < 1e-5, f"max |H_p(sqrt(t) X) - H_p(X) - (d/2) ln t| = {worst:.2e} (< 1e-5)")


def test_criterion_03_sharp_young_equality():
    e = YoungExponents(2.0, 4 / 3, 4 / 3)
    ratios = {}
    for n in (1024, 2048, 4096, 8192):
        f, g = (discretize(h, n=n) for h in matched_gaussians(e))
        cell = young_norm_check(f, g, e)
        ratios[n] = cell.rhs / cell.lhs  # ||f*g||_p / (C^{d/2} ||f||_q ||g||_r)
    final = ratios[8192]
    gaps = [abs(r - 1) for r in ratios.values()]
    trend = all(b <= a + 1e-4 for a, b in zip(gaps, gaps[1:]))
    ok = abs(final - 1) <= 1e-3 and trend
    verdict(3, ok, f"ratio at N=8192 = {final:.12f} (within 1e-3), |ratio-1| by N: "
            + ", ".join(f"{n}:{abs(r - 1):.1e}" for n, r in ratios.items()))


def test_criterion_04_exponent_search():
    cfg = SweepConfig.from_mapping({"kind": "lemma_search", "ensemble_size": 1000, "seed": 0,
                                    "lemma_p_max": 10, "tol_rel": 1e-9})
    start = time.perf_counter()
    report = run_sweep(cfg)
    elapsed = time.perf_counter() - start
    ps = [c.p for c in report.cells]
    ok = (len(report.cells) == 1000 and report.violation_count == 0 and elapsed < 30
          and min(ps) > 1 and max(ps) <= 10)
    verdict(4, ok, f"{len(report.cells)} triples, {report.violation_count} below (1-1/p)(1-1e-9), "
            f"min max F/(1-1/p) = {report.summary['min_ratio']:.6f}, {elapsed:.1f} s (< 30 s)")


@pytest.fixture(scope="module")
def weighted_sweep():
    cfg = load_config(CONFIGS / "weighted_families.yaml")
    start = time.perf_counter()
    report = run_sweep(cfg)
    return cfg, report, time.perf_counter() - start


def test_criterion_05_weighted_epi_sweep(weighted_sweep):
    cfg, report, elapsed = weighted_sweep
    names = sorted({spec["family"] for pair in cfg.pairs for spec in pair})
    grid_ok = (
        names == ["gaussian", "laplace", "mixture", "uniform"]
        and cfg.p_grid == [1.25, 1.5, 2.0, 3.0, 4.0]
        and cfg.t_grid == [0.1, 0.3, 0.5, 0.7, 0.9]
        and cfg.n_list == [4096]
        and all(c.alpha == (c.p + 1) / 2 for c in report.cells)
    )
    bad = [c for c in report.cells if c.ratio < 1 - (1e-6 + c.refinement_estimate)]
    ok = grid_ok and len(report.cells) >= 200 and not bad and report.violation_count == 0 and elapsed < 120
    verdict(5, ok, f"{len(report.cells)} cells, {len(bad)} violations, min ratio "
            f"{report.summary['min_ratio']:.6f}, {elapsed:.1f} s (< 120 s)")


def test_criterion_06_shannon_equality():
    ratios = [check_weighted_repi(Gaussian(0, 1), Gaussian(0, 1), 1.0, 1.0, t).ratio for t in (0.3, 0.5, 0.7)]
    worst = max(abs(r - 1) for r in ratios)
    verdict(6, worst < 1e-4, f"max |ratio - 1| over t in {{0.3, 0.5, 0.7}} = {worst:.2e} (< 1e-4)")


def test_criterion_07_quantum_suite():
    vac, th = GaussianQuantumState.vacuum(), GaussianQuantumState.thermal(3.0)
    closed = [
        (quantum_renyi_entropy(vac, 2.0), 0.0),
        (quantum_renyi_entropy(th, 2.0), math.log(3)),
        (quantum_entropy_power(vac, 2.0, 1.5), 1.0),
        (quantum_entropy_power(th, 2.0, 1.0), 3.0),
        (quantum_entropy_power(th, 2.0, 1.5), 3**1.5),
    ]
    cell = check_qrepi(vac, vac, 0.5, QuantumOrderParams(2.0, 1.5))
    closed += [(cell.lhs, 1.0), (cell.rhs, 2 * 0.5**1.5), (cell.ratio, math.sqrt(2))]
    cell = check_qrepi(th, th, 0.5, QuantumOrderParams(2.0, 1.5))
    closed += [(cell.lhs, 3**1.5), (cell.rhs, 2**-0.5 * 3**1.5), (cell.ratio, math.sqrt(2))]
    closed_err = max(abs(a - b) for a, b in closed)

    cfg = load_config(CONFIGS / "quantum_ensemble.yaml")
    start = time.perf_counter()
    report = run_sweep(cfg)
    elapsed = time.perf_counter() - start
    modes = {c.extra["modes"] for c in report.cells}
    expected = 500 * 3 * 3
    ok = (closed_err < 1e-12 and len(report.cells) == expected and report.violation_count == 0
          and modes == {1, 2} and elapsed < 30)
    verdict(7, ok, f"closed-form error {closed_err:.1e} (< 1e-12); {len(report.cells)} ensemble cells, "
            f"{report.violation_count} violations, min ratio {report.summary['min_ratio']:.6f}, {elapsed:.1f} s (< 30 s)")


def test_criterion_08_thermo_identity():
    spec = GridSpec.centered((0.0, 0.0), (8.0, 8.0), 512)
    energy = harmonic_energy(spec)
    t0 = reference_temperature(energy, spec)
    diffs = []
    for ratio in (2.0, 0.5):
        renyi_side, free_side = thermo_renyi_check(energy, spec, ratio * t0)
        diffs.append(abs(renyi_side - free_side))
    verdict(8, max(diffs) < 1e-4, f"kT0 = {t0:.10f}, |H_(T0/T) + F/(T-T0)| at T = 2T0, T0/2: "
            f"{diffs[0]:.1e}, {diffs[1]:.1e} (< 1e-4)")


def test_criterion_09_pinf_exhibit():
    report = search_pinf_violation(
        [(Uniform(0, 1), Uniform(0, 1)), (Gaussian(0, 1), Gaussian(0, 4)), (Gaussian(0, 0.25), Gaussian(0, 9))],
        "alpha_one",
    )
    uni, *gauss = report.cells
    g_err = max(abs(c.ratio - 1) for c in gauss)
    ok = abs(uni.ratio - 0.5) < 2e-2 and g_err < 1e-4
    verdict(9, ok, f"uniform pair ratio {uni.ratio:.5f} (0.5 within 2e-2), Gaussian max |ratio - 1| = {g_err:.1e} (< 1e-4)")


def test_criterion_10_determinism(weighted_sweep):
    cfg, first, _ = weighted_sweep
    second = run_sweep(load_config(CONFIGS / "weighted_families.yaml"))
    a, b = emit_report(first, "csv"), emit_report(second, "csv")
    verdict(10, a == b, f"two seeded runs of the weighted sweep: csv {'byte-identical' if a == b else 'differs'} "
            f"({len(a)} bytes)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
