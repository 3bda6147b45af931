"""Gaussian displacement sampling and syndrome-consistent candidate errors.

Shift samples are produced by a counter-based generator (Philox) keyed by
(run_seed, trial_index): trial i is reproducible without generating trials
< i, and the stream for a given configuration is independent of how trials
are partitioned across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import GkpCodeLayout
from .errors import InvalidInputError
from .lattice import LogicalClass, as_shift_vector, class_of_frame_integers


@dataclass(frozen=True)
class NoiseSample:
    """A shift drawn from the displacement channel, tagged with its seed path."""

    xi: np.ndarray
    run_seed: int
    trial_index: int


@dataclass(frozen=True)
class SyndromeRecord:
    """Decoder input for one trial.

    ``candidate`` is a shift consistent with the full syndrome: each
    inner-frame coordinate is reduced to its nearest representative modulo
    the inner stabilizer spacing (frame value in (-1, 1]), so xi - candidate
    is a stabilizer lattice vector.  Reducing modulo the inner *dual* instead
    would erase the outer-code syndrome and lame every decoder, so the
    binarized coordinates (``residual_bits``, the per-mode hard decisions)
    stay in the candidate.  ``true_class`` is the logical class of
    (xi - candidate), trivially I for this constructor; decoders must be
    (and are tested to be) equivariant under any other consistent choice.
    """

    candidate: np.ndarray
    residual_bits: np.ndarray
    true_class: LogicalClass


def _rng_for_trial(run_seed: int, trial_index: int) -> np.random.Generator:
    key = np.array([run_seed, trial_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_shift(sigma: float, n_modes: int, run_seed: int, trial_index: int) -> NoiseSample:
    """Draw 2N iid normal(0, sigma^2) quadrature shifts for one trial."""
    if not sigma > 0:
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    if n_modes < 1:
        raise InvalidInputError(f"n_modes must be >= 1, got {n_modes}")
    rng = _rng_for_trial(run_seed, trial_index)
    xi = sigma * rng.standard_normal(2 * n_modes)
    return NoiseSample(xi=xi, run_seed=run_seed, trial_index=trial_index)


def sample_shift_batch(sigma: float, n_modes: int, run_seed: int,
                       trial_indices: np.ndarray) -> np.ndarray:
    """Stack of shift vectors, one row per trial index (same per-trial streams)."""
    out = np.empty((len(trial_indices), 2 * n_modes))
    for row, trial in enumerate(trial_indices):
        rng = _rng_for_trial(run_seed, int(trial))
        out[row] = sigma * rng.standard_normal(2 * n_modes)
    return out


def reduce_frame_coords(x: np.ndarray):
    """Reduce frame coordinates modulo the inner stabilizer spacing.

    Returns (candidate coords in (-1, 1], residual bits, even integers 2k)
    with x = candidate + 2k and bits the per-mode hard decisions (1 where the
    coordinate is closer to an odd integer, ties toward the dual boundary
    +1/2 mapping to bit 0 at +1/2 exactly).
    """
    x = np.asarray(x, dtype=float)
    k2 = 2.0 * np.ceil(0.5 * (x - 1.0))
    c = x - k2
    bits = ((c > 0.5) | (c <= -0.5)).astype(np.uint8)
    return c, bits, k2.astype(np.int64)


def candidate_error(xi: np.ndarray, layout: GkpCodeLayout) -> SyndromeRecord:
    """Per-mode modular reduction of a shift into a syndrome-consistent candidate.

    The shift is expressed in the layout's inner frame and each coordinate is
    reduced to its nearest representative modulo 2 (frame units; ties fixed
    deterministically), i.e. modulo the inner-code stabilizer spacing in
    quadrature units.  The difference xi - candidate is then an inner
    stabilizer vector, so candidate and shift have identical syndromes for
    the full concatenated code, inner and outer alike.
    """
    xi = as_shift_vector(xi)
    if xi.size != 2 * layout.n_modes:
        raise InvalidInputError(
            f"shift of length {xi.size} does not match layout with {layout.n_modes} modes")
    c, bits, k2 = reduce_frame_coords(layout.to_frame(xi))
    true_class = class_of_frame_integers(k2, layout.logical_x_frame, layout.logical_z_frame)
    return SyndromeRecord(candidate=layout.from_frame(c),
                          residual_bits=bits,
                          true_class=true_class)


def candidate_error_batch(xis: np.ndarray, layout: GkpCodeLayout):
    """Vectorised candidate reduction: (frame candidates, residual bits, classes).

    ``frame candidates`` are the candidates in inner-frame coordinates, which
    is what the decoders consume directly; classes are quaternary labels of
    the (stabilizer) offsets xi - candidate, identically I here.
    """
    c, bits, k2 = reduce_frame_coords(layout.to_frame(np.asarray(xis, dtype=float)))
    from .lattice import pairing_parity
    x_bits = pairing_parity(k2, layout.logical_z_frame)
    z_bits = pairing_parity(k2, layout.logical_x_frame)
    classes = (x_bits + 2 * z_bits).astype(np.int64)
    return c, bits, classes
