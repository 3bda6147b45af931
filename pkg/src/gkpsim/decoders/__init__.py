"""Decoder backends for concatenated GKP codes.

Every decoder consumes a :class:`~gkpsim.channel.SyndromeRecord` and returns
the four unnormalised log coset weights together with the argmax class.  The
weight of class L is the total Gaussian mass of all shifts that are
equivalent, up to stabilizer lattice translations, to the candidate shifted
by a representative of L.  Ties are broken in the fixed order I < X < Z < Y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..lattice import LogicalClass

#: Finite stand-in for log(0) in weight arithmetic.
LOG_ZERO = -1e30

#: Map from quaternary order (I, X, Z, Y) to reporting order (I, X, Y, Z).
_QUAT_TO_IXYZ = (0, 1, 3, 2)


def weights_ixyz(quaternary_weights: np.ndarray) -> np.ndarray:
    """Reorder weights from the internal (I, X, Z, Y) order to (I, X, Y, Z)."""
    w = np.asarray(quaternary_weights, dtype=float)
    out = np.empty_like(w)
    for quat, pos in enumerate(_QUAT_TO_IXYZ):
        out[..., pos] = w[..., quat]
    return out


def chosen_class(quaternary_weights: np.ndarray) -> LogicalClass:
    """Argmax class; numpy's first-maximum rule realises the I < X < Z < Y order."""
    return LogicalClass.from_quaternary(int(np.argmax(quaternary_weights)))


@dataclass(frozen=True)
class DecodeResult:
    """Outcome of one decode: chosen class and log coset weights (I, X, Y, Z)."""

    chosen: LogicalClass
    log_coset_weights: np.ndarray
    backend: str

    @staticmethod
    def from_quaternary(weights: np.ndarray, backend: str) -> "DecodeResult":
        return DecodeResult(chosen=chosen_class(weights),
                            log_coset_weights=weights_ixyz(weights),
                            backend=backend)


from .brute_force import decode_brute_force, decode_brute_force_batch  # noqa: E402
from .partition import decode_partition_function, decode_partition_function_batch  # noqa: E402
from .tensor_network import decode_tensor_network  # noqa: E402
from .baseline import decode_baseline, decode_baseline_batch  # noqa: E402

__all__ = [
    "DecodeResult",
    "LOG_ZERO",
    "chosen_class",
    "weights_ixyz",
    "decode_brute_force",
    "decode_brute_force_batch",
    "decode_partition_function",
    "decode_partition_function_batch",
    "decode_tensor_network",
    "decode_baseline",
    "decode_baseline_batch",
]
