"""Exact MLD by summation over the full stabilizer group.

Feasible whenever 2^(N-1) stays below the enumeration guard; the per-qubit
weight tables are computed once and group elements only permute table
columns, so each coset weight is a log-sum-exp over gathered rows.
"""

from __future__ import annotations

import numpy as np

from ..channel import SyndromeRecord
from ..codes import GkpCodeLayout
from ..errors import FeasibilityError
from ..lattice import TIE_BREAK_ORDER
from ..weights import DEFAULT_N_V, coset_weight_table, logsumexp
from . import DecodeResult

GROUP_GUARD = 2**24


def _group_labels(layout: GkpCodeLayout) -> np.ndarray:
    """All stabilizer group elements as per-mode quaternary labels, shape (|G|, N)."""
    if layout.n_modes > 1 and 2 ** (layout.n_modes - 1) > GROUP_GUARD:
        raise FeasibilityError(
            f"stabilizer group with 2^{layout.n_modes - 1} elements exceeds the "
            f"brute-force guard of {GROUP_GUARD}")
    group = layout.stabilizer_group_frame()
    return (group[:, 0::2] + 2 * group[:, 1::2]).astype(np.int64)


def _class_labels(layout: GkpCodeLayout) -> np.ndarray:
    """Per-mode quaternary labels of the four logical representatives, (4, N)."""
    reps = np.stack([layout.logical_frame(cls) for cls in TIE_BREAK_ORDER])
    return (reps[:, 0::2] + 2 * reps[:, 1::2]).astype(np.int64)


def brute_force_weights(frame_candidates: np.ndarray, layout: GkpCodeLayout,
                        sigma: float, n_v: int = DEFAULT_N_V,
                        group_labels: np.ndarray | None = None) -> np.ndarray:
    """Quaternary-ordered log coset weights, batched over leading axes.

    frame_candidates: (..., 2N) inner-frame candidate coordinates.
    """
    if group_labels is None:
        group_labels = _group_labels(layout)
    table = coset_weight_table(layout, frame_candidates, sigma, n_v).log_tau_f4
    class_labels = _class_labels(layout)
    n = layout.n_modes
    qubit_idx = np.arange(n)
    out = np.empty(table.shape[:-2] + (4,))
    for k in range(4):
        labels = group_labels ^ class_labels[k]          # (|G|, N)
        gathered = table[..., qubit_idx, labels]          # (..., |G|, N)
        out[..., k] = logsumexp(gathered.sum(axis=-1))
    return out


def decode_brute_force(record: SyndromeRecord, layout: GkpCodeLayout, sigma: float,
                       n_v: int = DEFAULT_N_V) -> DecodeResult:
    """Exact MLD over the full stabilizer group for one record."""
    frame = layout.to_frame(record.candidate)
    weights = brute_force_weights(frame, layout, sigma, n_v)
    return DecodeResult.from_quaternary(weights, backend="brute-force")


def decode_brute_force_batch(frame_candidates: np.ndarray, layout: GkpCodeLayout,
                             sigma: float, n_v: int = DEFAULT_N_V,
                             chunk: int = 256) -> np.ndarray:
    """Batched brute-force weights (B, 4) in quaternary order for (B, 2N) inputs."""
    group_labels = _group_labels(layout)
    frames = np.asarray(frame_candidates, dtype=float)
    out = np.empty((frames.shape[0], 4))
    # keep the gathered (chunk, |G|, N) workspace at a modest size
    step = max(1, min(chunk, int(4e7 // max(1, group_labels.size))))
    for lo in range(0, frames.shape[0], step):
        out[lo:lo + step] = brute_force_weights(
            frames[lo:lo + step], layout, sigma, n_v, group_labels=group_labels)
    return out
