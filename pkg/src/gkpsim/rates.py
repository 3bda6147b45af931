"""Achievable rates and capacity bounds for the Gaussian displacement channel.

Covers the hashing rate of the induced Pauli channel, the closed-form
lower/upper bounds on the channel's quantum capacity, Gaussian-state entropy
via symplectic eigenvalues, and the thermal-input coherent information
computed two independent ways (three-mode covariance pipeline and closed
form).  Entropies are in bits (log base 2); 0 log 0 = 0 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvalidStateError
from .lattice import omega

#: Fourth moment of the position wavefunction of the pure ancilla states in
#: the displacement-channel dilation; fixed by purity.
ALPHA_PURE = 0.25

UNCERTAINTY_TOL = 1e-10


@dataclass(frozen=True)
class PauliChannelEstimate:
    """Estimated (p_I, p_X, p_Y, p_Z) with trial count and per-component CI radius."""

    p: np.ndarray
    trials: int
    ci_radius: float

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (4,) or np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-12:
            raise InvalidInputError(f"invalid probability vector {p}")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class GaussianState:
    """First and second moments of a Gaussian state.

    The covariance must be symmetric and satisfy the uncertainty relation
    V + i Omega / 2 >= 0 (within 1e-10).
    """

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.covariance, dtype=float)
        mean = np.asarray(self.mean, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] % 2 \
                or mean.shape != (v.shape[0],):
            raise InvalidInputError(
                f"inconsistent moments: mean {mean.shape}, covariance {v.shape}")
        if np.abs(v - v.T).max() > 1e-10:
            raise InvalidStateError("covariance matrix must be symmetric")
        herm = v + 0.5j * omega(v.shape[0] // 2)
        if np.linalg.eigvalsh(herm).min() < -UNCERTAINTY_TOL:
            raise InvalidStateError("covariance violates the uncertainty relation")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", v)

    @property
    def n_modes(self) -> int:
        return self.covariance.shape[0] // 2


def _xlog2x(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    mask = p > 0
    out[mask] = p[mask] * np.log2(p[mask])
    return out


def hashing_rate(p: np.ndarray | PauliChannelEstimate, n_modes: int) -> float:
    """Achievable rate (1 + sum_mu p_mu log2 p_mu) / N of the induced Pauli channel."""
    if isinstance(p, PauliChannelEstimate):
        p = p.p
    p = np.asarray(p, dtype=float)
    if n_modes < 1:
        raise InvalidInputError(f"n_modes must be >= 1, got {n_modes}")
    if p.shape != (4,) or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise InvalidInputError(f"invalid probability vector {p}")
    return float((1.0 + _xlog2x(p).sum()) / n_modes)


def capacity_bounds(sigma: float) -> tuple[float, float]:
    """(lower, upper) bounds on the quantum capacity of the displacement channel.

    lower = max(log2(1/(e sigma^2)), 0); upper = max(log2((1 - sigma^2)/sigma^2), 0).
    """
    if not sigma > 0:
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    var = sigma * sigma
    lower = max(-math.log2(math.e * var), 0.0)
    upper = max(math.log2((1.0 - var) / var), 0.0) if var < 1.0 else 0.0
    return lower, upper


def entropy_g(n: float) -> float:
    """g(n) = (n+1) log2(n+1) - n log2(n), the entropy of a thermal state in bits."""
    if n < 0:
        if n > -1e-9:
            n = 0.0
        else:
            raise InvalidInputError(f"entropy_g requires n >= 0, got {n}")
    if n == 0.0:
        return 0.0
    return float((n + 1.0) * math.log2(n + 1.0) - n * math.log2(n))


def symplectic_eigenvalues(v: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix (moduli of eig(i Omega V))."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] % 2:
        raise InvalidInputError(f"covariance matrix has invalid shape {v.shape}")
    v = 0.5 * (v + v.T)
    n = v.shape[0] // 2
    evs = np.linalg.eigvals(omega(n) @ v)
    if np.abs(evs.real).max() > 1e-8 * max(np.abs(evs.imag).max(), 1.0):
        raise InvalidStateError("Omega V has eigenvalues far from the imaginary axis")
    nus = np.sort(np.abs(evs.imag))
    paired = nus.reshape(n, 2)
    if np.abs(paired[:, 0] - paired[:, 1]).max() > 1e-8 * max(nus.max(), 1.0):
        raise InvalidStateError("symplectic eigenvalues failed to pair up")
    return paired.mean(axis=1)


def gaussian_entropy(v: np.ndarray | GaussianState) -> float:
    """Von Neumann entropy (bits) of a Gaussian state with covariance V."""
    if isinstance(v, GaussianState):
        v = v.covariance
    nus = symplectic_eigenvalues(v)
    if np.any(nus < 0.5 - 1e-6):
        raise InvalidStateError(
            f"covariance violates the uncertainty relation: min nu = {nus.min():.3e}")
    return float(sum(entropy_g(max(nu - 0.5, 0.0)) for nu in nus))


# ---------------------------------------------------------------------------
# thermal-input coherent information
# ---------------------------------------------------------------------------


def _sum_gate(j: int, k: int, n: int, dagger: bool = False) -> np.ndarray:
    """Symplectic matrix of SUM_{j->k} (q_k += q_j, p_j -= p_k) on n modes."""
    s = np.eye(2 * n)
    sign = -1.0 if dagger else 1.0
    s[2 * k, 2 * j] += sign          # q_k += q_j
    s[2 * j + 1, 2 * k + 1] -= sign  # p_j -= p_k
    return s


def dilation_symplectic() -> np.ndarray:
    """Symplectic of the displacement-channel dilation, SUM(1->3)^dag SUM(2->1)."""
    return _sum_gate(0, 2, 3, dagger=True) @ _sum_gate(1, 0, 3)


def dilation_covariance(n_bar: float, sigma: float) -> np.ndarray:
    """Input covariance: thermal mode plus the two pure Gaussian ancillas."""
    var = sigma * sigma
    v = np.zeros((6, 6))
    v[0, 0] = v[1, 1] = n_bar + 0.5
    v[2, 2] = var
    v[3, 3] = ALPHA_PURE / var
    v[4, 4] = ALPHA_PURE / var
    v[5, 5] = var
    return v


def thermal_coherent_information(n_bar: float, sigma: float,
                                 route: str = "covariance") -> float:
    """Coherent information of the channel for a thermal input of mean photon n_bar.

    route="covariance" pushes the three-mode covariance through the dilation
    and takes entropies of the output and complementary blocks;
    route="closed-form" evaluates the g-function expression directly.  The
    two agree to float precision and serve as oracles for one another.
    """
    if n_bar < 0 or not sigma > 0:
        raise InvalidInputError(f"need n_bar >= 0 and sigma > 0, got {n_bar}, {sigma}")
    var = sigma * sigma
    if route == "closed-form":
        sig_t = math.sqrt(4.0 * ALPHA_PURE + var * (2.0 + 4.0 * n_bar + var))
        out = entropy_g(n_bar + var)
        comp = entropy_g((sig_t + var - 1.0) / 2.0) + entropy_g((sig_t - var - 1.0) / 2.0)
        return out - comp
    if route != "covariance":
        raise InvalidInputError(f"unknown route {route!r}")
    s = dilation_symplectic()
    v_out = s @ dilation_covariance(n_bar, sigma) @ s.T
    s_channel = gaussian_entropy(v_out[:2, :2])
    s_complement = gaussian_entropy(v_out[2:, 2:])
    return s_channel - s_complement


# ---------------------------------------------------------------------------
# Pauli channel and its complementary channel
# ---------------------------------------------------------------------------

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_channel_output(p: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Apply the Pauli channel with probabilities (p_I, p_X, p_Y, p_Z)."""
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros_like(rho)
    for prob, name in zip(p, "IXYZ"):
        m = _PAULI[name]
        out += prob * (m @ rho @ m.conj().T)
    return out


def pauli_complementary_output(p: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """4x4 output of the complementary channel for input density matrix rho."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2) or abs(np.trace(rho) - 1.0) > 1e-10:
        raise InvalidInputError("rho must be a 2x2 unit-trace density matrix")
    if np.abs(rho - rho.conj().T).max() > 1e-10 or np.linalg.eigvalsh(rho).min() < -1e-10:
        raise InvalidInputError("rho must be Hermitian positive semidefinite")
    tx = np.trace(rho @ _PAULI["X"]).real
    ty = np.trace(rho @ _PAULI["Y"]).real
    tz = np.trace(rho @ _PAULI["Z"]).real
    pi, px, py, pz = (float(x) for x in p)

    def rt(a, b):
        return math.sqrt(a * b)

    return np.array([
        [pi, rt(pi, px) * tx, rt(pi, py) * ty, rt(pi, pz) * tz],
        [rt(pi, px) * tx, px, -1j * rt(px, py) * tz, 1j * rt(px, pz) * ty],
        [rt(pi, py) * ty, 1j * rt(px, py) * tz, py, -1j * rt(py, pz) * tx],
        [rt(pi, pz) * tz, -1j * rt(px, pz) * ty, 1j * rt(py, pz) * tx, pz],
    ], dtype=complex)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy in bits of a density matrix (eigenvalues clipped at zero)."""
    evs = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    if evs.min() < -1e-10:
        raise InvalidInputError(f"matrix is not PSD: min eigenvalue {evs.min():.3e}")
    evs = np.clip(evs.real, 0.0, None)
    return float(-_xlog2x(evs).sum())


def pauli_complementary_entropy(p: np.ndarray, rho: np.ndarray) -> float:
    """Entropy of the complementary Pauli-channel output for input rho."""
    return von_neumann_entropy(pauli_complementary_output(p, rho))
