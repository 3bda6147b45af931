import math

import numpy as np
import pytest

from gkpsim.channel import (candidate_error, candidate_error_batch,
                            sample_shift, sample_shift_batch)
from gkpsim.codes import build_layout
from gkpsim.errors import InvalidInputError
from gkpsim.lattice import LogicalClass

SQRT_PI = math.sqrt(math.pi)


def test_sampling_is_deterministic():
    a = sample_shift(0.5, 9, 1234, 77).xi
    b = sample_shift(0.5, 9, 1234, 77).xi
    assert a.tobytes() == b.tobytes()
    c = sample_shift(0.5, 9, 1234, 78).xi
    assert a.tobytes() != c.tobytes()
    d = sample_shift(0.5, 9, 1235, 77).xi
    assert a.tobytes() != d.tobytes()


def test_batch_matches_single_draws():
    batch = sample_shift_batch(0.6, 5, 42, np.arange(10, 20))
    for row, trial in enumerate(range(10, 20)):
        assert batch[row].tobytes() == sample_shift(0.6, 5, 42, trial).xi.tobytes()


def test_trial_stream_is_schedule_independent():
    # drawing trials in any order yields the same per-trial vectors
    forward = [sample_shift(0.55, 3, 9, t).xi for t in range(8)]
    backward = [sample_shift(0.55, 3, 9, t).xi for t in reversed(range(8))]
    for t in range(8):
        assert forward[t].tobytes() == backward[7 - t].tobytes()


def test_sample_moments():
    sigma = 0.6
    draws = sample_shift(sigma, 500_000, 7, 0).xi   # 10^6 normal draws
    assert draws.size == 1_000_000
    assert abs(draws.var() - sigma**2) < 0.01 * sigma**2
    assert abs(draws.mean()) < 4 * sigma / math.sqrt(draws.size)


def test_sampling_rejects_bad_arguments():
    with pytest.raises(InvalidInputError):
        sample_shift(0.0, 3, 0, 0)
    with pytest.raises(InvalidInputError):
        sample_shift(0.5, 0, 0, 0)


def test_zero_shift_gives_zero_candidate():
    layout = build_layout("surface-square", 3)
    rec = candidate_error(np.zeros(18), layout)
    assert np.allclose(rec.candidate, 0.0)
    assert rec.true_class is LogicalClass.I
    assert not rec.residual_bits.any()


def test_small_shift_is_its_own_candidate():
    layout = build_layout("surface-square", 3)
    rng = np.random.default_rng(0)
    xi = rng.uniform(-0.49, 0.49, size=18) * SQRT_PI
    rec = candidate_error(xi, layout)
    assert np.allclose(rec.candidate, xi, atol=1e-12)
    assert not rec.residual_bits.any()


def test_logical_shift_stays_in_candidate():
    # a sqrt(pi) shift is within the stabilizer cell: the candidate keeps it,
    # and the hard-decision bit records the displaced mode
    layout = build_layout("square-single", 1)
    xi = np.array([SQRT_PI, 0.0])
    rec = candidate_error(xi, layout)
    assert np.allclose(rec.candidate, xi, atol=1e-12)
    assert rec.true_class is LogicalClass.I
    assert rec.residual_bits.tolist() == [1, 0]
    # shifting by one more sqrt(pi) wraps back across the stabilizer cell
    rec2 = candidate_error(np.array([2 * SQRT_PI, 0.0]), layout)
    assert np.allclose(rec2.candidate, 0.0, atol=1e-12)
    assert rec2.true_class is LogicalClass.I


@pytest.mark.parametrize("family,d", [("square-single", 1), ("surface-square", 3),
                                      ("surface-square", 5), ("color-hex", 3),
                                      ("five-one-three-hex", 3)])
def test_candidate_offset_is_a_stabilizer_vector(family, d):
    """(candidate - xi) must land on the stabilizer lattice: even frame integers."""
    layout = build_layout(family, d)
    xis = sample_shift_batch(0.7, layout.n_modes, 3, np.arange(10_000))
    fracs, bits, classes = candidate_error_batch(xis, layout)
    offsets = layout.to_frame(xis) - fracs
    nearest = 2.0 * np.round(offsets / 2.0)
    assert np.abs(offsets - nearest).max() < 1e-9
    assert np.all(classes == 0)
    # candidates stay in the centered stabilizer cell
    assert fracs.max() <= 1.0 + 1e-12
    assert fracs.min() > -1.0 - 1e-12
    # bits are the per-mode hard decisions (nearest dual coset, ties fixed)
    expected_bits = (fracs > 0.5) | (fracs <= -0.5)
    assert np.array_equal(bits.astype(bool), expected_bits)


def test_candidate_rejects_dimension_mismatch():
    layout = build_layout("surface-square", 3)
    with pytest.raises(InvalidInputError):
        candidate_error(np.zeros(4), layout)


def test_hex_candidate_uses_inner_frame():
    layout = build_layout("hex-single", 1)
    rng = np.random.default_rng(8)
    xi = rng.normal(scale=0.8, size=2)
    rec = candidate_error(xi, layout)
    frame = layout.to_frame(rec.candidate)
    assert frame.max() <= 1.0 + 1e-12 and frame.min() > -1.0 - 1e-12
    offset = layout.to_frame(xi) - frame
    assert np.abs(offset - 2.0 * np.round(offset / 2.0)).max() < 1e-12
