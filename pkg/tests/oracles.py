"""Reference values computed without the Gaussian phase-space machinery.

Coherent light is handled with Jones vectors and Poisson counting; squeezed
vacuum with a truncated Fock-basis sum over binomially thinned photon pairs.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from scipy import stats

GOLDENS = Path(__file__).with_name("goldens.json")

# carrier Jones vectors per spatial channel; channel A at -45 deg, B at +45 deg
JONES_A = np.array([1.0, -1.0])
JONES_B = np.array([1.0, 1.0])


def _rot(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def coherent_counts(alpha: float, theta: float, eta: float = 1.0) -> dict[str, float]:
    """Mean photon numbers per detector for a coherent probe, via Jones vectors."""
    a = math.sqrt(eta) * alpha * (_rot(theta) @ JONES_A)
    b = math.sqrt(eta) * alpha * (_rot(theta) @ JONES_B)
    return {"AH": a[0] ** 2, "AV": a[1] ** 2, "BH": b[0] ** 2, "BV": b[1] ** 2}


def coherent_chiral(alpha: float, theta: float, eta: float = 1.0) -> tuple[float, float]:
    """Mean and variance of (n_AH - n_AV) - (n_BH - n_BV) for coherent light.

    Independent Poisson counts: the variance is the total detected photon number.
    """
    n = coherent_counts(alpha, theta, eta)
    mean = n["AH"] - n["AV"] - n["BH"] + n["BV"]
    return mean, sum(n.values())


def tmsv_difference_variance_fock(r: float, eta: float, cutoff: int = 400) -> float:
    """Var(k_a - k_b) for two-mode squeezed vacuum after loss eta on both modes.

    Photon pairs |n, n> occur with thermal weights; loss thins each arm
    binomially and independently.
    """
    nbar = math.sinh(r) ** 2
    n = np.arange(cutoff)
    p_n = (1.0 / (1.0 + nbar)) * (nbar / (1.0 + nbar)) ** n
    if p_n[-1] > 1e-14:
        raise ValueError("cutoff too small")
    mean = 0.0
    second = 0.0
    for k, w in zip(n, p_n):
        if w < 1e-300:
            break
        ks = np.arange(k + 1)
        pk = stats.binom.pmf(ks, k, eta)
        d = ks[:, None] - ks[None, :]
        joint = np.outer(pk, pk)
        mean += w * float((joint * d).sum())
        second += w * float((joint * d * d).sum())
    return second - mean**2


def tmsv_single_mode_variance(r: float) -> float:
    """Var(n_a) of one arm of two-mode squeezed vacuum (thermal marginal)."""
    nbar = math.sinh(r) ** 2
    return nbar * (nbar + 1.0)


def tmss_quadratures(r: float) -> dict[str, float]:
    G, g = math.cosh(r), math.sinh(r)
    return {
        "var_xa": G * G + g * g,
        "cov_xa_xb": 2 * G * g,
        "var_diff": 2 * (G - g) ** 2,
    }


def noise_ratio(r: float, eta: float) -> float:
    """Bright-carrier noise of the chiral observable relative to shot noise."""
    return eta * math.exp(-2 * r) + (1 - eta)


def enhancement_db(r: float, eta: float) -> float:
    return -10 * math.log10(noise_ratio(r, eta))


def coherent_snl_ratio(alpha: float, h: float = 1e-6) -> float:
    """Coherent-probe delta-theta divided by 1/sqrt(N) at the same photon number."""
    slope = (coherent_chiral(alpha, h)[0] - coherent_chiral(alpha, -h)[0]) / (2 * h)
    _, var = coherent_chiral(alpha, 0.0)
    return (math.sqrt(var) / abs(slope)) * math.sqrt(var)


def threshold_ratio(delta_snr_db: float) -> float:
    return 10 ** (delta_snr_db / 20)


def compute_goldens() -> dict:
    ln2 = math.log(2.0)
    q = tmss_quadratures(ln2)
    return {
        "_note": "values from tests/oracles.py; regenerate with `python tests/oracles.py`",
        "tmss_ln2_var_xa": q["var_xa"],
        "tmss_ln2_cov_xa_xb": q["cov_xa_xb"],
        "tmss_ln2_var_diff": q["var_diff"],
        "squeezing_ln2_db": 10 * math.log10(q["var_diff"] / 2),
        "squeezing_ln2_eta0912_db": -enhancement_db(ln2, 0.912),
        "enhancement_lossless_db": enhancement_db(ln2, 1.0),
        "enhancement_default_budget_db": enhancement_db(ln2, 0.95 * 0.96),
        "snl_ratio_lossless": coherent_snl_ratio(100.0),
        "threshold_ratio_5db": threshold_ratio(5.0),
        "tmsv_fock_var_r05_eta08": tmsv_difference_variance_fock(0.5, 0.8),
    }


if __name__ == "__main__":
    GOLDENS.write_text(json.dumps(compute_goldens(), indent=2, sort_keys=True) + "\n")
    print(GOLDENS.read_text())
