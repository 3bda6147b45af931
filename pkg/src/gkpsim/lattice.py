"""Quadrature-space primitives.

Conventions used throughout the package:

* Quadratures are interleaved: a length-2N shift vector is ordered
  (q1, p1, ..., qN, pN), with hbar = 1 so that [q, p] = i.
* The symplectic form is Omega = I_N (x) [[0, 1], [-1, 0]].
* Stabilizers of a GKP code are displacements by vectors of sqrt(2*pi) * Lambda
  for a symplectically integral lattice Lambda; logical operators live in the
  symplectic dual, sqrt(2*pi) * Lambda_perp.
* Every code layout carries a per-mode "inner frame": quadrature coordinates
  divided by sqrt(pi) (and rotated by the inverse inner symplectic matrix for
  hexagonal codes).  In frame coordinates the single-mode dual lattice is the
  integer lattice Z^{2N}, stabilizer generators are binary vectors, and
  logical classes are parities of integer symplectic pairings.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvalidStateError, LatticeMembershipError

SYMPLECTIC_TOL = 1e-12
#: Absolute per-component tolerance for lattice membership after reduction.
TOL_LATTICE = 1e-9


def omega(n_modes: int) -> np.ndarray:
    """Symplectic form on n_modes modes in interleaved (q, p) ordering."""
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), block)


def symplectic_deviation(s: np.ndarray) -> float:
    """max |S Omega S^T - Omega| for a candidate symplectic matrix."""
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
        raise InvalidInputError(f"matrix of shape {s.shape} cannot be symplectic")
    om = omega(s.shape[0] // 2)
    return float(np.abs(s @ om @ s.T - om).max())


def check_symplectic(s: np.ndarray, tol: float = SYMPLECTIC_TOL) -> np.ndarray:
    """Validate S Omega S^T = Omega within tol and return S as a float array."""
    dev = symplectic_deviation(s)
    if dev >= tol:
        raise InvalidInputError(f"matrix is not symplectic: |S Omega S^T - Omega| = {dev:g}")
    return np.asarray(s, dtype=float)


def as_shift_vector(xi: np.ndarray) -> np.ndarray:
    """Validate and return a quadrature shift vector (finite, even length)."""
    v = np.asarray(xi, dtype=float)
    if v.ndim != 1 or v.size == 0 or v.size % 2:
        raise InvalidInputError(f"shift vector must have positive even length, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("shift vector has non-finite components")
    return v


@dataclass(frozen=True)
class GaussianNoiseModel:
    """Isotropic Gaussian displacement noise with per-quadrature deviation sigma."""

    sigma: float

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidStateError(f"sigma must be positive, got {self.sigma}")


def log_gaussian_density(xi: np.ndarray, sigma: float) -> float:
    """Exact log density of the iid Gaussian shift distribution.

    Returns -||xi||^2 / (2 sigma^2) - (dim/2) * ln(2 pi sigma^2) in natural
    log, with the dimension-correct normalisation.  Decoders only ever use
    differences of log weights, so the prefactor never enters a decision.
    """
    v = as_shift_vector(xi)
    if not (np.isfinite(sigma) and sigma > 0):
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    var = sigma * sigma
    return float(-(v @ v) / (2.0 * var) - 0.5 * v.size * math.log(2.0 * math.pi * var))


class LogicalClass(enum.Enum):
    """Element of the Klein four-group {I, X, Y, Z} labelling a logical coset."""

    I = (0, 0)
    X = (1, 0)
    Z = (0, 1)
    Y = (1, 1)

    @property
    def x_bit(self) -> int:
        return self.value[0]

    @property
    def z_bit(self) -> int:
        return self.value[1]

    @property
    def quaternary(self) -> int:
        """F4 label with the I=0, X=1, Z=2, Y=3 convention."""
        return self.x_bit + 2 * self.z_bit

    @staticmethod
    def from_bits(x_bit: int, z_bit: int) -> "LogicalClass":
        return _CLASS_BY_BITS[(x_bit & 1, z_bit & 1)]

    @staticmethod
    def from_quaternary(label: int) -> "LogicalClass":
        return _CLASS_BY_BITS[(label & 1, (label >> 1) & 1)]


_CLASS_BY_BITS = {c.value: c for c in LogicalClass}

#: Deterministic tie-break preference for equal coset weights.
TIE_BREAK_ORDER = (LogicalClass.I, LogicalClass.X, LogicalClass.Z, LogicalClass.Y)


def compose(a: LogicalClass, b: LogicalClass) -> LogicalClass:
    """Klein four-group product (X * Z = Y, every element self-inverse)."""
    return LogicalClass.from_bits(a.x_bit ^ b.x_bit, a.z_bit ^ b.z_bit)


def pairing_parity(m: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Parity of the integer symplectic pairing m^T Omega b in frame coordinates.

    Both arguments are integer arrays whose last axis has length 2N in
    interleaved ordering; broadcasting over leading axes is supported.
    """
    m = np.asarray(m, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    mq, mp = m[..., 0::2], m[..., 1::2]
    bq, bp = b[..., 0::2], b[..., 1::2]
    return ((mq * bp).sum(axis=-1) + (mp * bq).sum(axis=-1)) % 2


def class_of_frame_integers(n: np.ndarray, logical_x_frame: np.ndarray,
                            logical_z_frame: np.ndarray) -> LogicalClass:
    """Logical class of a frame-integer dual vector from its logical pairings.

    The class has an X component iff the pairing with the logical-Z
    representative is odd, and a Z component iff the pairing with the
    logical-X representative is odd.
    """
    x_bit = int(pairing_parity(n, logical_z_frame))
    z_bit = int(pairing_parity(n, logical_x_frame))
    return LogicalClass.from_bits(x_bit, z_bit)


def logical_class_of(v: np.ndarray, layout, tol: float = TOL_LATTICE) -> LogicalClass:
    """Coset label of a dual-lattice vector v in sqrt(2 pi)(Lambda_perp / Lambda).

    v is given in quadrature coordinates; it must reduce to integers in the
    layout's inner frame within tol (per component), else a
    LatticeMembershipError is raised.
    """
    v = as_shift_vector(v)
    if v.size != 2 * layout.n_modes:
        raise InvalidInputError(
            f"vector of length {v.size} does not match layout with {layout.n_modes} modes")
    c = layout.to_frame(v)
    n = np.round(c)
    err = np.abs(c - n).max() if c.size else 0.0
    if err > tol:
        raise LatticeMembershipError(
            f"vector is {err:g} away from the dual lattice in frame coordinates (tol {tol:g})")
    return class_of_frame_integers(n.astype(np.int64),
                                   layout.logical_x_frame, layout.logical_z_frame)
