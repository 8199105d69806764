"""Self-checks run by ``chirasim validate``.

Each check compares a pipeline quantity against an independent route
(closed-form algebra, sampling, finite differences or a calibration signal).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dsp import DetectionTrace, NoiseModel, snr_at, spectrum, synthesize_trace
from .gaussian import (
    AH,
    BH,
    CANONICAL_MODES,
    PASpec,
    SymplecticOp,
    beam_splitter_op,
    compose,
    loss_channel,
    phase_shifter,
    polarization_rotator,
    symplectic_defect,
    two_mode_squeeze,
    two_mode_squeezer,
    vacuum,
)
from .pipeline import ProbeConfig, sample_plane_state
from .polarimetry import (
    monte_carlo_stats,
    ordering_correction,
    probe_observable,
    sensitivity_report,
)
from .sample import enantiomeric_excess, sample_from_ee
from .sampling import substream

LN2 = math.log(2.0)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "detail": self.detail}


def _db(x: float) -> float:
    return 10 * math.log10(x)


def difference_variance(state, a=AH, b=BH) -> float:
    """Var(X_a - X_b) from the covariance matrix."""
    _, cov = state.block((a, b))
    return float(cov[0, 0] + cov[2, 2] - 2 * cov[0, 2])


def check_squeezing(samples: int, seed: int) -> Check:
    st = two_mode_squeeze(vacuum(4), PASpec(LN2, 0.0, (AH, BH)))
    v = difference_variance(st)
    level = _db(v / 2.0)
    mu, cov = st.block((AH, BH))
    draws = substream(seed, 101).multivariate_normal(mu, cov, size=samples)
    d = draws[:, 0] - draws[:, 2]
    v_mc = float(d.var(ddof=1))
    se = v_mc * math.sqrt(2.0 / (samples - 1))
    ok = abs(level + 6.0206) < 0.05 and abs(v_mc - v) < 3 * se
    return Check("squeezing-level", ok, f"analytic {level:.4f} dB, MC variance {v_mc:.5f} vs {v:.5f} (3se {3 * se:.5f})")


def check_loss_budget() -> Check:
    st = two_mode_squeeze(vacuum(4), PASpec(LN2, 0.0, (AH, BH)))
    for m in CANONICAL_MODES:
        st = loss_channel(st, m, 0.912)
    level = _db(difference_variance(st) / 2.0)
    return Check("loss-budget", abs(level + 5.0) < 0.05, f"{level:.4f} dB after eta = 0.912")


def check_slope() -> Check:
    worst = 0.0
    for alpha in (10.0, 50.0, 200.0):
        cfg = ProbeConfig(r=0.0, alpha=alpha).lossless()
        h = 1e-5
        fd = (probe_observable(cfg, h).mean - probe_observable(cfg, -h).mean) / (2 * h)
        worst = max(worst, abs(fd / (8 * alpha**2) - 1))
    return Check("signal-slope", worst < 5e-3, f"max relative deviation from 8 alpha^2: {worst:.2e}")


def random_configuration(rng: np.random.Generator) -> tuple[ProbeConfig, float]:
    alpha = float(rng.uniform(10.0, 200.0))
    r = float(rng.uniform(0.0, 1.5))
    eta = float(rng.uniform(0.5, 1.0))
    theta = float(rng.uniform(-0.05, 0.05))
    return ProbeConfig(r=r, alpha=alpha, mode_eta=(eta,) * 4, detector_qe=1.0), theta


def check_oracle_equivalence(n_configs: int, samples: int, seed: int, workers=None) -> Check:
    rng = substream(seed, 102)
    corr = ordering_correction()
    bad = []
    for i in range(n_configs):
        cfg, theta = random_configuration(rng)
        plane = sample_plane_state(cfg)
        exact = probe_observable(cfg, theta)
        mc = monte_carlo_stats(plane, samples=samples, seed=seed + i, theta=theta, workers=workers)
        if abs(mc.variance - exact.variance) > 3 * mc.mc_var_stderr + corr:
            bad.append(i)
    return Check(
        "oracle-equivalence",
        not bad,
        f"{n_configs - len(bad)}/{n_configs} configurations agree ({samples} samples each)",
    )


def random_pipeline_op(rng: np.random.Generator, labels=CANONICAL_MODES) -> SymplecticOp:
    kind = rng.integers(4)
    i, j = rng.choice(len(labels), size=2, replace=False)
    a, b = labels[i], labels[j]
    if kind == 0:
        return two_mode_squeezer(labels, PASpec(float(rng.uniform(0, 1.0)), float(rng.uniform(0, 2 * np.pi)), (a, b)))
    if kind == 1:
        return beam_splitter_op(labels, a, b, float(rng.uniform()), float(rng.uniform(0, 2 * np.pi)))
    if kind == 2:
        return polarization_rotator(labels, a.spatial, float(rng.uniform(-np.pi, np.pi)))
    return phase_shifter(labels, a, float(rng.uniform(0, 2 * np.pi)))


def check_symplectic(n: int, seed: int) -> Check:
    rng = substream(seed, 103)
    worst_defect, worst_phys = 0.0, np.inf
    for _ in range(n):
        ops = [random_pipeline_op(rng) for _ in range(int(rng.integers(1, 5)))]
        total = compose(ops)
        worst_defect = max(worst_defect, symplectic_defect(total.matrix))
        st = total.apply(vacuum(4))
        worst_phys = min(worst_phys, float(st.symplectic_eigenvalues().min()))
    ok = worst_defect < 1e-10 and worst_phys >= 1 - 1e-9
    return Check("symplectic-suite", ok, f"max defect {worst_defect:.2e}, min symplectic eigenvalue {worst_phys:.12f}")


def check_ee() -> Check:
    worst = max(abs(enantiomeric_excess(sample_from_ee(e, 0.1267)) - e) for e in np.linspace(-1, 1, 41))
    return Check("ee-roundtrip", worst < 1e-12, f"max round-trip error {worst:.1e}")


def check_calibration() -> Check:
    fs, rbw = 12e6, 1e3
    n = int(fs / rbw) * 4
    t = np.arange(n) / fs
    amp = 0.37
    tr = DetectionTrace(amp * np.sin(2 * np.pi * 1.5e6 * t + 0.3), fs, n / fs, 0)
    sp = spectrum(tr, rbw, rbw / 4)
    k = int(np.argmin(np.abs(sp.freqs_hz - 1.5e6)))
    err = abs(sp.power_db[k] - _db(amp**2 / 2))
    white = substream(0, 104).standard_normal(int(fs / rbw) * 64)
    wt = DetectionTrace(white, fs, len(white) / fs, 0)
    a = np.median(spectrum(wt, rbw, rbw / 32).power_db)
    b = np.median(spectrum(wt, rbw / 2, rbw / 64).power_db)
    shift = a - b
    ok = err < 0.1 and abs(shift - 3.0) < 0.2
    return Check("spectrum-calibration", ok, f"tone error {err:.3f} dB, rbw-halving shift {shift:.3f} dB")


def check_snr_enhancement(seed: int, angles_deg=(0.1, 0.5, 1.0)) -> Check:
    ent = ProbeConfig()
    coh = ent.coherent_matched()
    model = NoiseModel()
    diffs = []
    for k, a in enumerate(angles_deg):
        theta = 2 * math.radians(a)
        snrs = []
        for p, probe in enumerate((coh, ent)):
            tr = synthesize_trace(probe, theta, model, duration=0.1, seed=seed, stream=(p, k))
            snrs.append(snr_at(spectrum(tr, 1e3, 10.0), 1.5e6, (1.4e6, 1.6e6)))
        diffs.append(snrs[1] - snrs[0])
    ok = all(abs(d - 5.0) <= 0.5 for d in diffs) and max(diffs) - min(diffs) <= 1.0
    return Check("snr-enhancement", ok, "dSNR " + ", ".join(f"{d:.2f}" for d in diffs) + " dB")


def check_sensitivity() -> Check:
    lossless = sensitivity_report(ProbeConfig(alpha=1e3).lossless()).enhancement_db
    lossy = sensitivity_report(ProbeConfig(alpha=1e3)).enhancement_db
    ok = abs(lossless - 6.02) <= 0.05 and abs(lossy - 5.0) <= 0.1
    return Check("sensitivity", ok, f"enhancement {lossless:.3f} dB lossless, {lossy:.3f} dB with default losses")


def check_determinism(seed: int) -> Check:
    p = ProbeConfig()
    a = synthesize_trace(p, 0.01, duration=0.002, seed=seed)
    b = synthesize_trace(p, 0.01, duration=0.002, seed=seed)
    plane = sample_plane_state(replace(p, alpha=100.0))
    m1 = monte_carlo_stats(plane, samples=40_000, seed=seed, workers=1)
    m4 = monte_carlo_stats(plane, samples=40_000, seed=seed, workers=4)
    ok = np.array_equal(a.samples, b.samples) and m1 == m4
    return Check("determinism", ok, "trace and Monte Carlo reproducible across workers" if ok else "mismatch")


def run_checks(quick: bool = False, seed: int = 12345, workers=None) -> list[Check]:
    samples = 20_000 if quick else 100_000
    return [
        check_squeezing(samples, seed),
        check_loss_budget(),
        check_slope(),
        check_sensitivity(),
        check_oracle_equivalence(5 if quick else 20, samples, seed, workers),
        check_symplectic(200 if quick else 1000, seed),
        check_ee(),
        check_calibration(),
        check_snr_enhancement(seed),
        check_determinism(seed),
    ]
