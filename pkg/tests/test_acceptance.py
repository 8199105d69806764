"""Acceptance criteria 1-10, each at its stated tolerance and runtime limit.

Every test prints one ``criterion N: PASS|FAIL`` line; the lines are also
collected into the pytest terminal summary.
"""
import math
import time

import numpy as np
import pytest

import oracles
from conftest import ACCEPTANCE_LINES
from chirasim.config import load_config
from chirasim.dsp import DetectionTrace, detected_noise_psd, spectrum, tone_amplitude
from chirasim.gaussian import (
    AH,
    BH,
    PASpec,
    compose,
    symplectic_defect,
    two_mode_squeeze,
    uniform_loss,
    vacuum,
)
from chirasim.outputs import emit_outputs
from chirasim.pipeline import ProbeConfig, sample_plane_state
from chirasim.polarimetry import monte_carlo_stats, probe_observable
from chirasim.sample import enantiomeric_excess, rotation_angle, sample_from_ee
from chirasim.sampling import substream
from chirasim.scenarios import min_resolvable, probe_pair, run_scenario, scenario_points
from chirasim.validation import random_configuration, random_pipeline_op

LN2 = math.log(2.0)
FS = 12e6


def record(n: int, ok: bool, detail: str, elapsed: float, limit: float | None = None):
    within = limit is None or elapsed < limit
    status = "PASS" if ok and within else "FAIL"
    budget = f" (limit {limit:g} s)" if limit is not None else ""
    line = f"criterion {n}: {status}  {detail}  [{elapsed:.2f} s{budget}]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert within, line


def diff_variance(state):
    _, cov = state.block((AH, BH))
    return cov[0, 0] + cov[2, 2] - 2 * cov[0, 2]


def test_criterion_1_squeezing_level(goldens):
    t0 = time.perf_counter()
    st = two_mode_squeeze(vacuum(4), PASpec(LN2, 0.0, (AH, BH)))
    assert (math.cosh(LN2), math.sinh(LN2)) == pytest.approx((1.25, 0.75))
    v = diff_variance(st)
    level = 10 * math.log10(v / 2)
    mu, cov = st.block((AH, BH))
    n = 100_000
    draws = substream(1, 1).multivariate_normal(mu, cov, size=n)
    v_mc = float((draws[:, 0] - draws[:, 2]).var(ddof=1))
    sigma = v * math.sqrt(2 / (n - 1))
    ok = (
        v / 2 == pytest.approx(0.25, abs=1e-12)
        and abs(level - goldens["squeezing_ln2_db"]) < 1e-9
        and abs(level + 6.02) < 0.05
        and abs(v_mc - v) < 3 * sigma
    )
    detail = f"analytic {level:.4f} dB, MC variance {v_mc:.5f} vs {v:.5f} (3 sigma {3 * sigma:.5f})"
    record(1, ok, detail, time.perf_counter() - t0, 5.0)


def test_criterion_2_loss_budget(goldens):
    t0 = time.perf_counter()
    st = uniform_loss(two_mode_squeeze(vacuum(4), PASpec(LN2, 0.0, (AH, BH))), 0.912)
    level = 10 * math.log10(diff_variance(st) / 2)
    ok = abs(level + 5.0) <= 0.05 and abs(level - goldens["squeezing_ln2_eta0912_db"]) < 1e-9
    record(2, ok, f"{level:.4f} dB at eta = 0.912", time.perf_counter() - t0, 1.0)


def test_criterion_3_signal_slope():
    t0 = time.perf_counter()
    devs = []
    for alpha in (10.0, 50.0, 200.0):
        cfg = ProbeConfig(alpha=alpha).lossless()
        h = 1e-5
        fd = (probe_observable(cfg, h).mean - probe_observable(cfg, -h).mean) / (2 * h)
        devs.append(abs(fd / (8 * alpha**2) - 1))
    record(3, max(devs) < 5e-3, f"max relative deviation {max(devs):.2e}", time.perf_counter() - t0, 1.0)


@pytest.fixture(scope="module")
def angle_report(repo_root):
    t0 = time.perf_counter()
    cfg = load_config(repo_root / "configs" / "snr_vs_angle.yaml")
    return run_scenario(cfg), time.perf_counter() - t0


def test_criterion_4_snr_enhancement(angle_report):
    rep, elapsed = angle_report
    coh, ent = rep.by_probe("coherent"), rep.by_probe("entangled")
    assert [c.point for c in coh] == pytest.approx([0.1 * k for k in range(1, 11)])
    diffs = np.array([e.snr_db - c.snr_db for c, e in zip(coh, ent)])
    ok = bool(np.all(np.abs(diffs - 5.0) <= 0.5) and np.all(np.abs(diffs - diffs.mean()) <= 0.5))
    detail = f"dSNR {diffs.min():.2f}..{diffs.max():.2f} dB (mean {diffs.mean():.2f}) over 0.1-1.0 deg"
    record(4, ok, detail, elapsed, 60.0)


def test_criterion_5_oracle_equivalence():
    t0 = time.perf_counter()
    rng = substream(2024, 5)
    worst = -np.inf
    agree = 0
    n_cfg = 20
    for i in range(n_cfg):
        cfg, theta = random_configuration(rng)
        exact = probe_observable(cfg, theta)
        mc = monte_carlo_stats(
            sample_plane_state(cfg), samples=100_000, seed=1000 + i, theta=theta,
            efficiency=cfg.detector_qe * cfg.sample_transmission,
        )
        excess = abs(mc.variance - exact.variance) - (3 * mc.mc_var_stderr + 1.0)
        worst = max(worst, excess)
        agree += excess <= 0
    detail = f"{agree}/{n_cfg} configurations within 3 stderr + 1.0 (worst margin {worst:.3g})"
    record(5, agree == n_cfg, detail, time.perf_counter() - t0, 120.0)


def test_criterion_6_symplectic_suite():
    t0 = time.perf_counter()
    rng = substream(2024, 6)
    worst_defect, worst_nu = 0.0, np.inf
    for _ in range(1000):
        op = compose([random_pipeline_op(rng) for _ in range(int(rng.integers(1, 6)))])
        worst_defect = max(worst_defect, symplectic_defect(op.matrix))
        state = uniform_loss(op.apply(vacuum(4)), float(rng.uniform(0.5, 1.0)))
        worst_nu = min(worst_nu, float(state.symplectic_eigenvalues().min()))
    ok = worst_defect < 1e-10 and worst_nu >= 1 - 1e-9
    detail = f"max defect {worst_defect:.1e}, min symplectic eigenvalue {worst_nu:.12f}"
    record(6, ok, detail, time.perf_counter() - t0, 10.0)


def test_criterion_7_sweep_structure(repo_root):
    t0 = time.perf_counter()
    cfg = load_config(repo_root / "configs" / "sweep_concentration.yaml")
    points, thetas = scenario_points(cfg)
    probe = probe_pair(cfg)["entangled"]
    amps = np.array([tone_amplitude(probe, th, cfg.probe.mod_depth) for th in thetas])
    x = np.array(points)
    fit = np.polyfit(x, amps, 1)
    resid = amps - np.polyval(fit, x)
    r2 = 1 - resid @ resid / np.sum((amps - amps.mean()) ** 2)

    rep = run_scenario(cfg)
    coh, ent = rep.by_probe("coherent"), rep.by_probe("entangled")
    regime = [c.point for c, e in zip(coh, ent) if c.snr_db < 0 < e.snr_db]
    res = min_resolvable(rep)
    model = cfg.dsp.noise.model()
    pr = probe_pair(cfg)
    f = cfg.probe.f_mod_hz
    dsnr = 10 * math.log10(detected_noise_psd(model, pr["coherent"], f) / detected_noise_psd(model, pr["entangled"], f))
    expected = oracles.threshold_ratio(dsnr)
    ok = r2 > 0.999 and bool(regime) and abs(res["ratio"] / expected - 1) <= 0.10
    detail = (
        f"R^2 {r2:.6f}, entangled-only points {regime}, ratio {res['ratio']:.3f} "
        f"vs 10^({dsnr:.2f}/20) = {expected:.3f}"
    )
    record(7, ok, detail, time.perf_counter() - t0, 120.0)


def test_criterion_8_ee_arithmetic():
    t0 = time.perf_counter()
    grid = np.linspace(-1, 1, 201)
    err = max(abs(enantiomeric_excess(sample_from_ee(float(e), t)) - e) for e in grid for t in (0.01, 0.1267, 1.0))
    s = sample_from_ee(0.9, 0.12 / 0.95)
    antisym = rotation_angle(s.mirrored()) == -rotation_angle(s)
    ok = err <= 1e-12 and math.isclose(s.conc_L, 0.12, rel_tol=1e-12) and antisym and rotation_angle(s) > 0
    detail = f"round-trip error {err:.1e}, 90% e.e. L = {s.conc_L:.4f} g/mL, D = {s.conc_D:.4f} g/mL, mirror exact {antisym}"
    record(8, ok, detail, time.perf_counter() - t0)


def test_criterion_9_spectrum_calibration():
    t0 = time.perf_counter()
    rbw = 1e3
    n = int(FS / rbw) * 4
    t = np.arange(n) / FS
    tone_err = 0.0
    for amp, f in [(1.0, 1.5e6), (0.01, 0.7e6), (3.3, 2.345e6), (0.2, 5.1e6)]:
        sp = spectrum(DetectionTrace(amp * np.sin(2 * np.pi * f * t + 0.7), FS, n / FS, 0), rbw, rbw / 4)
        k = int(np.argmin(np.abs(sp.freqs_hz - f)))
        tone_err = max(tone_err, abs(sp.power_db[k] - 10 * math.log10(amp**2 / 2)))

    white = substream(9, 9).standard_normal(int(FS / rbw) * 256)
    tr = DetectionTrace(white, FS, len(white) / FS, 9)
    sp = spectrum(tr, rbw, rbw / 256)
    overall = np.mean(sp.power[sp.band(50e3, 5.95e6)])
    flat = max(
        abs(10 * math.log10(np.mean(sp.power[sp.band(lo, lo + 100e3)]) / overall))
        for lo in np.arange(50e3, 5.85e6, 100e3)
    )
    half = spectrum(tr, rbw / 2, rbw / 256)
    shift = np.median(sp.power_db) - np.median(half.power_db)
    ok = tone_err <= 0.1 and flat <= 0.5 and abs(shift - 3.0) <= 0.2
    detail = f"tone error {tone_err:.3f} dB, flatness {flat:.3f} dB, rbw-halving shift {shift:.3f} dB"
    record(9, ok, detail, time.perf_counter() - t0)


def test_criterion_10_determinism(repo_root, tmp_path):
    t0 = time.perf_counter()
    cfg = load_config(repo_root / "configs" / "sweep_concentration.yaml")
    blobs = []
    for w in (1, 4, 16):
        out = tmp_path / f"w{w}"
        emit_outputs(run_scenario(cfg, workers=w), out)
        blobs.append((out / "points.csv").read_bytes())
    ok = blobs[0] == blobs[1] == blobs[2] and len(blobs[0]) > 0
    record(10, ok, f"points.csv identical under 1, 4, 16 workers ({len(blobs[0])} bytes)", time.perf_counter() - t0)
