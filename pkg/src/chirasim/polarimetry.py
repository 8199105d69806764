"""Measurement observables and rotation sensitivity of the four-mode probe.

Photon-number observables are quadratic forms in the quadratures, so their
first two moments follow exactly from the Gaussian mean and covariance.  The
Monte Carlo backend draws quadrature vectors from the same Gaussian (its
Wigner function) and averages the symmetric-ordered intensities; it serves
as an independent check of the closed-form route.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateError
from .gaussian import (
    CANONICAL_MODES,
    GaussianState,
    ModeLabel,
    Polarization,
    Spatial,
    symplectic_form,
)
from .pipeline import (
    OBSERVABLE_SIGNS,
    ProbeConfig,
    post_sample_efficiency,
    sample_plane_state,
)
from .sampling import map_ordered, substream

MC_BATCH = 1 << 14
MIN_MC_SAMPLES = 1000
BRIGHT_PHOTONS = 100.0


class Backend(str, enum.Enum):
    ANALYTIC = "Analytic"
    MONTE_CARLO = "MonteCarlo"


class Observable(str, enum.Enum):
    STOKES_DIFF = "StokesDiff"
    CHIRAL = "ChiralObs"


@dataclass(frozen=True)
class ObservableStats:
    mean: float
    variance: float
    slope_wrt_theta: float
    backend: Backend = Backend.ANALYTIC
    mc_samples: int = 0
    mc_stderr: float = 0.0
    mc_var_stderr: float = 0.0

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("variance must be non-negative")
        if (self.mc_stderr > 0) != (self.backend is Backend.MONTE_CARLO):
            raise ValueError("mc_stderr is positive exactly for Monte Carlo results")


@dataclass(frozen=True)
class SensitivityReport:
    delta_theta: float
    snl_delta_theta: float
    enhancement_db: float
    total_photons: float
    G: float
    g: float
    snl_closed_form: float
    gain_factor_db: float

    @property
    def noise_ratio_db(self) -> float:
        return -self.enhancement_db


# ---------------------------------------------------------------------------
# quadratic-form moments


def _weights(labels, signs: dict[ModeLabel, float]) -> np.ndarray:
    w = np.zeros(2 * len(labels))
    for k, lab in enumerate(labels):
        w[2 * k : 2 * k + 2] = signs.get(lab, 0.0)
    return w


def _quadratic_moments(mean, cov, w):
    """Exact <Q> and Var(Q) for Q = sum_k w_k n_k on a Gaussian state.

    The Wigner symbol of Q is r^T M r / 2 - sum(w)/2 with M = diag(w) / 2.
    The quantum variance differs from the phase-space variance by the
    state-independent Moyal term tr(Omega^T M Omega M) / 2.
    """
    M = np.diag(w) / 2
    n = len(w) // 2
    om = symplectic_form(n)
    mu = np.asarray(mean)
    mv = M @ cov
    q_mean = 0.5 * np.trace(mv) + 0.5 * mu @ M @ mu - w[::2].sum() / 2
    var_w = 0.5 * np.trace(mv @ mv) + (M @ mu) @ cov @ (M @ mu)
    moyal = 0.5 * np.trace(om.T @ M @ om @ M)
    return float(q_mean), float(var_w - moyal), float(moyal)


def ordering_correction(signs: dict[ModeLabel, float] | None = None, labels=CANONICAL_MODES) -> float:
    """Excess variance of symmetric-ordered sampling over the quantum variance."""
    w = _weights(labels, OBSERVABLE_SIGNS if signs is None else signs)
    return _quadratic_moments(np.zeros(len(w)), np.eye(len(w)), w)[2]


def _rotation_generator(labels) -> np.ndarray:
    """d/dtheta of the joint rotation of both spatial channels, at theta = 0."""
    n = len(labels)
    D = np.zeros((2 * n, 2 * n))
    for sp in Spatial:
        h, v = ModeLabel(sp, Polarization.H), ModeLabel(sp, Polarization.V)
        if h in labels and v in labels:
            i, j = labels.index(h), labels.index(v)
            for q in range(2):
                D[2 * i + q, 2 * j + q] = -1.0
                D[2 * j + q, 2 * i + q] = 1.0
    return D


def _rotation(labels, theta) -> np.ndarray:
    n = len(labels)
    Rm = np.eye(2 * n)
    c, s = math.cos(theta), math.sin(theta)
    for sp in Spatial:
        h, v = ModeLabel(sp, Polarization.H), ModeLabel(sp, Polarization.V)
        if h in labels and v in labels:
            i, j = labels.index(h), labels.index(v)
            for q in range(2):
                Rm[2 * i + q, 2 * i + q] = c
                Rm[2 * j + q, 2 * j + q] = c
                Rm[2 * i + q, 2 * j + q] = -s
                Rm[2 * j + q, 2 * i + q] = s
    return Rm


def _require_pipeline_modes(state: GaussianState):
    missing = [str(m) for m in CANONICAL_MODES if m not in state.labels]
    if missing:
        raise ValueError(f"chiral observable needs modes {', '.join(missing)}")


# ---------------------------------------------------------------------------
# analytic backend


def stokes_difference_linearized(state: GaussianState, spatial) -> ObservableStats:
    """First-order moments of n_H - n_V in one spatial channel.

    The fluctuation is the projection of the quadrature noise on the carrier
    direction of each polarization, i.e. alpha * dX_{H-V} for a balanced
    real carrier.
    """
    sp = Spatial(spatial)
    h, v = ModeLabel(sp, Polarization.H), ModeLabel(sp, Polarization.V)
    mu, cov = state.block((h, v))
    amp_h, amp_v = abs(complex(*mu[:2])) / 2, abs(complex(*mu[2:])) / 2
    hi = max(amp_h, amp_v)
    if hi > 0 and abs(amp_h - amp_v) > 0.1 * hi:
        warnings.warn(
            f"carrier amplitudes differ by more than 10% ({amp_h:.4g} vs {amp_v:.4g}); "
            "linearization is inaccurate",
            RuntimeWarning,
            stacklevel=2,
        )
    grad = np.concatenate([mu[:2] / 2, -mu[2:] / 2])
    mean = (mu[:2] @ mu[:2] - mu[2:] @ mu[2:]) / 4
    return ObservableStats(mean=float(mean), variance=float(grad @ cov @ grad), slope_wrt_theta=0.0)


def chiral_observable(
    state: GaussianState,
    theta: float,
    efficiency: float = 1.0,
) -> ObservableStats:
    """Moments of N_3,- = N_a3,- - N_b3,- after the sample rotates by ``theta``.

    ``state`` is the probe at the sample plane; ``efficiency`` is the uniform
    transmission between the sample and the photodiodes.  Mean, variance and
    d<N>/dtheta are exact for the Gaussian state (no linearization).
    """
    _require_pipeline_modes(state)
    if not 0.0 <= efficiency <= 1.0:
        raise ValueError("efficiency must lie in [0, 1]")
    labels = state.labels
    w = _weights(labels, OBSERVABLE_SIGNS)
    Rm = _rotation(labels, theta)
    dR = _rotation_generator(labels) @ Rm
    mu, cov = state.mean, state.cov
    mu_t = math.sqrt(efficiency) * (Rm @ mu)
    cov_t = efficiency * (Rm @ cov @ Rm.T) + (1 - efficiency) * np.eye(len(mu))
    mean, var, _ = _quadratic_moments(mu_t, cov_t, w)
    M = np.diag(w) / 2
    slope = efficiency * (np.trace(M @ dR @ cov @ Rm.T) + (dR @ mu) @ M @ (Rm @ mu))
    return ObservableStats(mean=mean, variance=max(var, 0.0), slope_wrt_theta=float(slope))


def probe_observable(cfg: ProbeConfig, theta: float) -> ObservableStats:
    return chiral_observable(sample_plane_state(cfg), theta, post_sample_efficiency(cfg))


def snl_closed_form(n_total: float) -> float:
    if not n_total > 0:
        raise ValueError("photon number must be positive")
    return 1.0 / math.sqrt(n_total)


def snl_delta_theta(n_total: float, probe: ProbeConfig | None = None, theta: float = 0.0) -> float:
    """Coherent-probe rotation sensitivity at ``n_total`` sample-plane photons.

    Runs the r = 0 pipeline with the optics of ``probe`` (lossless by
    default), scaled to the requested photon number.
    """
    if not n_total > 0:
        raise ValueError("photon number must be positive")
    base = ProbeConfig(r=0.0).lossless() if probe is None else probe
    coh = replace(base, r=0.0).with_photons(n_total)
    return _delta_theta(probe_observable(coh, theta))


def _delta_theta(stats: ObservableStats) -> float:
    scale = max(abs(stats.mean), math.sqrt(stats.variance), 1.0)
    if abs(stats.slope_wrt_theta) <= 1e-12 * scale:
        raise DegenerateError("signal slope vanishes; rotation sensitivity is undefined")
    return math.sqrt(stats.variance) / abs(stats.slope_wrt_theta)


def sensitivity_report(probe: ProbeConfig, sample_theta: float = 0.0) -> SensitivityReport:
    plane = sample_plane_state(probe)
    n_t = plane.total_photons()
    stats = chiral_observable(plane, sample_theta, post_sample_efficiency(probe))
    dt = _delta_theta(stats)
    snl = snl_delta_theta(n_t, probe, sample_theta)
    G, g = math.cosh(probe.r), math.sinh(probe.r)
    return SensitivityReport(
        delta_theta=dt,
        snl_delta_theta=snl,
        enhancement_db=20 * math.log10(snl / dt),
        total_photons=n_t,
        G=G,
        g=g,
        snl_closed_form=snl_closed_form(n_t),
        gain_factor_db=10 * math.log10(G * G + g * g),
    )


# ---------------------------------------------------------------------------
# Monte Carlo backend


def _sqrt_cov(cov: np.ndarray) -> np.ndarray:
    lam, U = np.linalg.eigh(cov)
    return U * np.sqrt(np.clip(lam, 0.0, None))


def monte_carlo_stats(
    state: GaussianState,
    observable=Observable.CHIRAL,
    samples: int = 100_000,
    seed: int = 0,
    *,
    theta: float = 0.0,
    efficiency: float = 1.0,
    spatial=Spatial.A,
    workers: int | None = None,
) -> ObservableStats:
    """Sample the Wigner function and average symmetric-ordered intensities.

    For the chiral observable ``state`` is the sample-plane probe and the
    rotation and post-sample loss are applied per draw; the slope is the
    pathwise derivative with respect to ``theta``.  The returned variance is
    the raw phase-space variance, which exceeds the quantum variance by
    :func:`ordering_correction`.
    """
    observable = Observable(observable)
    if samples < MIN_MC_SAMPLES:
        raise ValueError(f"need at least {MIN_MC_SAMPLES} samples")
    if not state.is_physical():
        raise ValueError("covariance violates the uncertainty bound")
    if not 0.0 <= efficiency <= 1.0:
        raise ValueError("efficiency must lie in [0, 1]")

    labels = state.labels
    dim = 2 * len(labels)
    if observable is Observable.CHIRAL:
        _require_pipeline_modes(state)
        w = _weights(labels, OBSERVABLE_SIGNS)
        Rm = _rotation(labels, theta)
        dR = _rotation_generator(labels) @ Rm
    else:
        sp = Spatial(spatial)
        w = _weights(labels, {ModeLabel(sp, Polarization.H): 1.0, ModeLabel(sp, Polarization.V): -1.0})
        Rm, dR, efficiency = np.eye(dim), np.zeros((dim, dim)), 1.0

    carriers = [state.amplitude(m) for m, s in zip(labels, w[::2]) if s]
    if min(abs(a) ** 2 for a in carriers) < BRIGHT_PHOTONS:
        warnings.warn(
            "carrier below 100 photons per mode; symmetric-ordering correction is not negligible",
            RuntimeWarning,
            stacklevel=2,
        )

    A = _sqrt_cov(state.cov)
    mu = state.mean
    keep, leak = math.sqrt(efficiency), math.sqrt(1.0 - efficiency)
    n_batches = -(-samples // MC_BATCH)

    def run(b: int):
        size = min(MC_BATCH, samples - b * MC_BATCH)
        rng = substream(seed, b)
        z = rng.standard_normal((size, dim))
        r0 = mu + z @ A.T
        r = keep * (r0 @ Rm.T)
        if leak:
            r = r + leak * rng.standard_normal((size, dim))
        dr = keep * (r0 @ dR.T)
        q = (r * r - 1.0) @ w / 4
        dq = (r * dr) @ w / 2
        return q, dq

    parts = map_ordered(run, range(n_batches), workers)
    q = np.concatenate([p[0] for p in parts])
    dq = np.concatenate([p[1] for p in parts])
    n = len(q)
    mean = float(q.mean())
    dev = q - mean
    var = float(dev @ dev / (n - 1))
    m4 = float(np.mean(dev**4))
    return ObservableStats(
        mean=mean,
        variance=var,
        slope_wrt_theta=float(dq.mean()),
        backend=Backend.MONTE_CARLO,
        mc_samples=n,
        mc_stderr=math.sqrt(var / n),
        mc_var_stderr=math.sqrt(max(m4 - var * var, 0.0) / n),
    )
