"""Suboptimal comparison decoder: per-mode hard decisions plus min-weight outer step.

Each mode is first corrected to its nearest inner-code representative (this
is exactly the candidate reduction, so the information left for the outer
stage is the binarized residual).  The outer stage then picks the
minimum-weight Pauli correction consistent with the outer syndrome by
exhaustive search over the stabilizer group: per-side Hamming weight for CSS
layouts, joint Pauli weight otherwise.  The analog information discarded by
the hard decision is what separates this decoder from the MLD paths.
"""

from __future__ import annotations

import numpy as np

from ..channel import SyndromeRecord
from ..codes import GkpCodeLayout
from ..errors import FeasibilityError
from ..f2 import enumerate_group, pack_bits, popcount_u64
from ..lattice import TIE_BREAK_ORDER
from . import DecodeResult

SIDE_GROUP_GUARD = 2**24


def _css_side_minw(e_bits: np.ndarray, group_packed: np.ndarray,
                   logical_packed: np.uint64) -> tuple[np.ndarray, np.ndarray]:
    """(min weight no-logical, with-logical) per batch row of packed side bits."""
    e = pack_bits(e_bits)
    w0 = popcount_u64(e[:, None] ^ group_packed[None, :]).min(axis=1).astype(np.int64)
    w1 = popcount_u64((e ^ logical_packed)[:, None] ^ group_packed[None, :]) \
        .min(axis=1).astype(np.int64)
    return w0, w1


def baseline_weights_batch(residual_bits: np.ndarray, layout: GkpCodeLayout) -> np.ndarray:
    """Pseudo log weights (B, 4) in quaternary order: minus the coset min weight.

    Like the MLD weights, entry l scores the hypothesis "the binarized error
    equals the hard decisions up to a class-l logical": it is -min weight
    over the corrections in the residual's syndrome class whose offset from
    the hard decisions has class l.  The argmax picks the minimum-weight
    correction with ties broken toward I.
    """
    bits = np.atleast_2d(np.asarray(residual_bits, dtype=np.uint8))
    b = bits.shape[0]
    n = layout.n_modes

    if layout.is_css and n <= 64:
        kx = layout.x_stabilizers.shape[0]
        kz = layout.z_stabilizers.shape[0]
        if 2**kx > SIDE_GROUP_GUARD or 2**kz > SIDE_GROUP_GUARD:
            raise FeasibilityError("outer code too large for the exhaustive baseline step")
        gx = pack_bits(enumerate_group(layout.x_stabilizers))
        gz = pack_bits(enumerate_group(layout.z_stabilizers))
        lx = pack_bits(layout.logical_x[None, :])[0]
        lz = pack_bits(layout.logical_z[None, :])[0]
        # q-side (X-type) corrections are checked against the X group, p side
        # against the Z group
        wq0, wq1 = _css_side_minw(bits[:, 0::2], gx, lx)
        wp0, wp1 = _css_side_minw(bits[:, 1::2], gz, lz)
        return -np.stack([wq0 + wp0, wq1 + wp0, wq0 + wp1, wq1 + wp1],
                         axis=-1).astype(float)

    group = layout.stabilizer_group_frame()
    if group.shape[0] > SIDE_GROUP_GUARD:
        raise FeasibilityError("outer code too large for the exhaustive baseline step")
    rel = np.empty((b, 4))
    for k, cls in enumerate(TIE_BREAK_ORDER):
        rep = layout.logical_frame(cls)
        v = bits[:, None, :] ^ group[None, :, :] ^ rep[None, None, :]
        pauli_w = ((v[..., 0::2] | v[..., 1::2]) != 0).sum(axis=-1)
        rel[:, k] = -pauli_w.min(axis=1)
    return rel


def decode_baseline(record: SyndromeRecord, layout: GkpCodeLayout,
                    sigma: float | None = None) -> DecodeResult:
    """Hard-decision baseline decode of one record (sigma is unused)."""
    weights = baseline_weights_batch(record.residual_bits[None, :], layout)[0]
    return DecodeResult.from_quaternary(weights, backend="baseline")


def decode_baseline_batch(residual_bits: np.ndarray, layout: GkpCodeLayout,
                          chunk: int = 4096) -> np.ndarray:
    """Batched pseudo-weights (B, 4) in quaternary order."""
    bits = np.asarray(residual_bits, dtype=np.uint8)
    out = np.empty((bits.shape[0], 4))
    for lo in range(0, bits.shape[0], chunk):
        out[lo:lo + chunk] = baseline_weights_batch(bits[lo:lo + chunk], layout)
    return out
