"""Multimode Gaussian states and the symplectic optics acting on them.

Quadratures follow X = a + a^dagger, P = i(a^dagger - a), so the vacuum
covariance is the identity and [X, P] = 2i.  Modes are ordered
(A.H, A.V, B.H, B.V) and the phase-space vector is (X1, P1, ..., X4, P4).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

SYMMETRY_TOL = 1e-12
SYMPLECTIC_TOL = 1e-10
PHYSICAL_TOL = 1e-9


class Spatial(str, enum.Enum):
    A = "A"
    B = "B"


class Polarization(str, enum.Enum):
    H = "H"
    V = "V"


@dataclass(frozen=True, order=False)
class ModeLabel:
    spatial: Spatial
    polarization: Polarization

    def __post_init__(self):
        object.__setattr__(self, "spatial", Spatial(self.spatial))
        object.__setattr__(self, "polarization", Polarization(self.polarization))

    @classmethod
    def parse(cls, text: str) -> "ModeLabel":
        """Build a label from strings such as ``"AH"`` or ``"B.V"``."""
        t = text.replace(".", "").replace("·", "").strip().upper()
        if len(t) != 2:
            raise ValueError(f"cannot parse mode label {text!r}")
        return cls(Spatial(t[0]), Polarization(t[1]))

    def __str__(self) -> str:
        return f"{self.spatial.value}{self.polarization.value}"


AH = ModeLabel(Spatial.A, Polarization.H)
AV = ModeLabel(Spatial.A, Polarization.V)
BH = ModeLabel(Spatial.B, Polarization.H)
BV = ModeLabel(Spatial.B, Polarization.V)
CANONICAL_MODES: tuple[ModeLabel, ...] = (AH, AV, BH, BV)


def _as_label(mode) -> ModeLabel:
    if isinstance(mode, ModeLabel):
        return mode
    if isinstance(mode, str):
        return ModeLabel.parse(mode)
    raise ValueError(f"not a mode label: {mode!r}")


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def rotation2(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    n = cov.shape[0] // 2
    ev = np.linalg.eigvals(1j * symplectic_form(n) @ cov)
    return np.sort(np.abs(ev))[::2]


@dataclass(frozen=True)
class GaussianState:
    """First and second quadrature moments over labeled optical modes."""

    mean: np.ndarray
    cov: np.ndarray
    labels: tuple[ModeLabel, ...]

    def __post_init__(self):
        labels = tuple(_as_label(m) for m in self.labels)
        m = len(labels)
        if m == 0:
            raise ValueError("a state needs at least one mode")
        if len(set(labels)) != m:
            raise ValueError("mode labels must be unique")
        mean = _frozen(self.mean)
        cov = _frozen(self.cov)
        if mean.shape != (2 * m,) or cov.shape != (2 * m, 2 * m):
            raise ValueError(
                f"shape mismatch: {m} modes, mean {mean.shape}, cov {cov.shape}"
            )
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * scale:
            raise ValueError("covariance matrix is not symmetric")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return len(self.labels)

    def index(self, mode) -> int:
        label = _as_label(mode)
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"mode {label} not present in state") from None

    def amplitude(self, mode) -> complex:
        """Mean field <a> of one mode."""
        i = self.index(mode)
        return complex(self.mean[2 * i], self.mean[2 * i + 1]) / 2

    def photon_number(self, mode) -> float:
        i = self.index(mode)
        x, p = self.mean[2 * i : 2 * i + 2]
        return (self.cov[2 * i, 2 * i] + self.cov[2 * i + 1, 2 * i + 1] + x * x + p * p - 2) / 4

    def total_photons(self) -> float:
        return float(sum(self.photon_number(m) for m in self.labels))

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.cov)

    def is_physical(self, tol: float = PHYSICAL_TOL) -> bool:
        return bool(np.all(self.symplectic_eigenvalues() >= 1 - tol))

    def block(self, modes: Sequence) -> tuple[np.ndarray, np.ndarray]:
        """Mean and covariance restricted to ``modes`` (in the given order)."""
        idx = np.concatenate([[2 * self.index(m), 2 * self.index(m) + 1] for m in modes])
        return self.mean[idx], self.cov[np.ix_(idx, idx)]


@dataclass(frozen=True)
class SymplecticOp:
    """Affine phase-space map r -> S r + d for lossless Gaussian optics."""

    matrix: np.ndarray
    displacement: np.ndarray = field(default=None)

    def __post_init__(self):
        s = _frozen(self.matrix)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
            raise ValueError(f"symplectic matrix must be square of even size, got {s.shape}")
        d = np.zeros(s.shape[0]) if self.displacement is None else self.displacement
        d = _frozen(d)
        if d.shape != (s.shape[0],):
            raise ValueError("displacement length does not match matrix")
        err = symplectic_defect(s)
        if err >= SYMPLECTIC_TOL:
            raise ValueError(f"matrix is not symplectic (defect {err:.3g})")
        object.__setattr__(self, "matrix", s)
        object.__setattr__(self, "displacement", d)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    @classmethod
    def identity(cls, n_modes: int) -> "SymplecticOp":
        return cls(np.eye(2 * n_modes))

    def inverse(self) -> "SymplecticOp":
        n = self.n_modes
        om = symplectic_form(n)
        s_inv = -om @ self.matrix.T @ om
        return SymplecticOp(s_inv, -s_inv @ self.displacement)

    def apply(self, state: GaussianState) -> GaussianState:
        if state.n_modes != self.n_modes:
            raise ValueError("operator and state have different mode counts")
        s = self.matrix
        return GaussianState(s @ state.mean + self.displacement, s @ state.cov @ s.T, state.labels)


def symplectic_defect(s: np.ndarray) -> float:
    om = symplectic_form(s.shape[0] // 2)
    return float(np.max(np.abs(s @ om @ s.T - om)))


@dataclass(frozen=True)
class PASpec:
    """Parametric amplifier acting on a pair of modes."""

    r: float
    pump_phase: float = 0.0
    target_pair: tuple[ModeLabel, ModeLabel] = (AH, BH)

    def __post_init__(self):
        if not np.isfinite(self.r) or self.r < 0:
            raise ValueError("squeezing parameter r must be >= 0; flip pump_phase instead")
        a, b = (_as_label(m) for m in self.target_pair)
        if a == b:
            raise ValueError("two-mode squeezer needs two distinct modes")
        object.__setattr__(self, "target_pair", (a, b))

    @property
    def G(self) -> float:
        return float(np.cosh(self.r))

    @property
    def g(self) -> float:
        return float(np.sinh(self.r))


# ----------------------------------------------------------------------------
# operator builders


def _embed(labels: Sequence[ModeLabel], modes: Sequence, local: np.ndarray) -> np.ndarray:
    labels = tuple(labels)
    idx = []
    for m in modes:
        lab = _as_label(m)
        if lab not in labels:
            raise ValueError(f"mode {lab} not present in state")
        k = labels.index(lab)
        idx += [2 * k, 2 * k + 1]
    full = np.eye(2 * len(labels))
    full[np.ix_(idx, idx)] = local
    return full


def two_mode_squeezer(labels: Sequence, spec: PASpec) -> SymplecticOp:
    """a -> G a + g e^{i phi} b^dagger, b -> G b + g e^{i phi} a^dagger."""
    G, g, phi = spec.G, spec.g, spec.pump_phase
    refl = np.array([[np.cos(phi), np.sin(phi)], [np.sin(phi), -np.cos(phi)]])
    local = np.block([[G * np.eye(2), g * refl], [g * refl, G * np.eye(2)]])
    return SymplecticOp(_embed(labels, spec.target_pair, local))


def beam_splitter_op(labels: Sequence, mode_i, mode_j, transmissivity: float, phase: float = 0.0) -> SymplecticOp:
    if not 0.0 <= transmissivity <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {transmissivity}")
    if _as_label(mode_i) == _as_label(mode_j):
        raise ValueError("beam splitter needs two distinct modes")
    c, s = np.sqrt(transmissivity), np.sqrt(1.0 - transmissivity)
    local = np.block([[c * np.eye(2), -s * rotation2(-phase)], [s * rotation2(phase), c * np.eye(2)]])
    return SymplecticOp(_embed(labels, (mode_i, mode_j), local))


def polarization_rotator(labels: Sequence, spatial, theta: float) -> SymplecticOp:
    sp = Spatial(spatial)
    c, s = np.cos(theta), np.sin(theta)
    local = np.block([[c * np.eye(2), -s * np.eye(2)], [s * np.eye(2), c * np.eye(2)]])
    modes = (ModeLabel(sp, Polarization.H), ModeLabel(sp, Polarization.V))
    return SymplecticOp(_embed(labels, modes, local))


def phase_shifter(labels: Sequence, mode, phi: float) -> SymplecticOp:
    return SymplecticOp(_embed(labels, (mode,), rotation2(phi)))


def compose(ops: Iterable[SymplecticOp], n_modes: int | None = None) -> SymplecticOp:
    """Single operator equivalent to applying ``ops`` in order.

    ``n_modes`` sizes the identity returned for an empty list (default 4).
    """
    ops = list(ops)
    if not ops:
        return SymplecticOp.identity(4 if n_modes is None else n_modes)
    dim = ops[0].matrix.shape[0]
    s = np.eye(dim)
    d = np.zeros(dim)
    for op in ops:
        if op.matrix.shape[0] != dim:
            raise ValueError("cannot compose operators of different dimension")
        s = op.matrix @ s
        d = op.matrix @ d + op.displacement
    return SymplecticOp(s, d)


# ----------------------------------------------------------------------------
# state-level operations


def vacuum(n_modes: int) -> GaussianState:
    if not isinstance(n_modes, (int, np.integer)) or n_modes < 1:
        raise ValueError("vacuum needs at least one mode")
    if n_modes > len(CANONICAL_MODES):
        raise ValueError(f"at most {len(CANONICAL_MODES)} labeled modes exist")
    return GaussianState(np.zeros(2 * n_modes), np.eye(2 * n_modes), CANONICAL_MODES[:n_modes])


def displace(state: GaussianState, mode, alpha: complex) -> GaussianState:
    i = state.index(mode)
    mean = state.mean.copy()
    mean[2 * i] += 2 * np.real(alpha)
    mean[2 * i + 1] += 2 * np.imag(alpha)
    return GaussianState(mean, state.cov, state.labels)


def two_mode_squeeze(state: GaussianState, spec: PASpec) -> GaussianState:
    return two_mode_squeezer(state.labels, spec).apply(state)


def beam_splitter(state: GaussianState, mode_i, mode_j, transmissivity: float, phase: float = 0.0) -> GaussianState:
    return beam_splitter_op(state.labels, mode_i, mode_j, transmissivity, phase).apply(state)


def polarization_rotate(state: GaussianState, spatial, theta: float) -> GaussianState:
    """Rotate the linear polarization of one spatial channel by ``theta``.

    Positive angles are the sense produced by an L-enantiomer.
    """
    return polarization_rotator(state.labels, spatial, theta).apply(state)


def phase_shift(state: GaussianState, mode, phi: float) -> GaussianState:
    return phase_shifter(state.labels, mode, phi).apply(state)


def loss_channel(state: GaussianState, mode, eta: float) -> GaussianState:
    """Mix one mode with vacuum on a beam splitter of transmissivity ``eta``."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"loss transmissivity must lie in [0, 1], got {eta}")
    i = state.index(mode)
    k = np.ones(2 * state.n_modes)
    k[2 * i : 2 * i + 2] = np.sqrt(eta)
    cov = state.cov * np.outer(k, k)
    cov[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] += (1.0 - eta) * np.eye(2)
    return GaussianState(state.mean * k, cov, state.labels)


def uniform_loss(state: GaussianState, eta: float) -> GaussianState:
    for m in state.labels:
        state = loss_channel(state, m, eta)
    return state
