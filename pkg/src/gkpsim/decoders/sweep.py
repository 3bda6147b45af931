"""Sweep-line contraction of planar tensor networks with bond truncation.

The contractor sweeps a line across a planar straight-line drawing of the
network, maintaining the already-contracted region as an MPS over the open
edges cut by the line.  When the line reaches a tensor, the MPS sites of its
incoming edges (contiguous by planarity) are merged with the tensor and the
result is split back into one site per outgoing edge via SVDs, truncated to
``max_bond`` (0 = unbounded) and a relative singular-value floor.  Singular
vectors are sign-fixed (largest-magnitude entry positive) so contraction
results are reproducible bit for bit.

Assumptions: the drawing is planar with straight edges in general position
and no two tensors share more than one edge.  A running scale factor keeps
intermediate tensors O(1); the result is (log|Z|, sign).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import NumericalFailureError

#: Shear applied to x coordinates so the processing order is strict.
_SHEAR = 0.1371205073735414

SV_RELATIVE_FLOOR = 1e-14


class _ExactZero(Exception):
    """Internal: the network value is exactly zero (factors underflowed)."""


@dataclass
class _Site:
    edge: int               # edge id of this open leg
    dst: int                # tensor that will consume it
    array: np.ndarray       # (Dl, d, Dr)


def _thin_svd(theta: np.ndarray):
    """SVD with a QR reduction of the long side first (faster on skew shapes)."""
    m, n = theta.shape
    if m >= 2 * n:
        q, r = np.linalg.qr(theta)
        u, s, vt = np.linalg.svd(r, full_matrices=False)
        return q @ u, s, vt
    if n >= 2 * m:
        q, r = np.linalg.qr(theta.T)
        u, s, vt = np.linalg.svd(r.T, full_matrices=False)
        return u, s, vt @ q.T
    return np.linalg.svd(theta, full_matrices=False)


def _svd_split(theta: np.ndarray, max_bond: int):
    """theta (m, n) -> (u * s, vT) truncated, with deterministic sign fixing."""
    u, s, vt = _thin_svd(theta)
    if s[0] > 0:
        rank = int(np.count_nonzero(s >= SV_RELATIVE_FLOOR * s[0]))
    else:
        rank = 1
    if max_bond > 0:
        rank = min(rank, max_bond)
    rank = max(rank, 1)
    u, s, vt = u[:, :rank], s[:rank], vt[:rank]
    signs = np.sign(u[np.argmax(np.abs(u), axis=0), np.arange(rank)])
    signs[signs == 0] = 1.0
    return u * (s * signs), vt * signs[:, None]


class _PlanarSweep:
    def __init__(self, tensors, legs, positions, max_bond):
        self.tensors = tensors
        self.legs = legs
        self.pos = positions
        self.max_bond = max_bond
        self.xs = [positions[k][0] + _SHEAR * positions[k][1] for k in range(len(tensors))]
        self.sites: list[_Site] = []
        self.log_scale = 0.0
        self.scalar = 1.0
        self.edge_ends: dict[int, list[int]] = {}
        for k, ll in enumerate(legs):
            for e in ll:
                self.edge_ends.setdefault(e, []).append(k)
        for e, ends in self.edge_ends.items():
            if len(ends) != 2:
                raise ValueError(f"edge {e} has {len(ends)} endpoints, expected 2")

    def _other(self, e: int, k: int) -> int:
        a, b = self.edge_ends[e]
        return b if a == k else a

    def _rescale(self, arr: np.ndarray) -> np.ndarray:
        m = float(np.abs(arr).max())
        if m == 0.0:
            raise _ExactZero
        if not math.isfinite(m):
            raise NumericalFailureError(f"contraction produced a degenerate tensor (max={m})")
        self.log_scale += math.log(m)
        return arr / m

    def _crossing_y(self, site: _Site, x_now: float) -> float:
        dst = site.dst
        src = self._other(site.edge, dst)
        x0, y0 = self.xs[src], self.pos[src][1]
        x1, y1 = self.xs[dst], self.pos[dst][1]
        if x1 == x0:
            return 0.5 * (y0 + y1)
        t = (x_now - x0) / (x1 - x0)
        return y0 + t * (y1 - y0)

    def _split_and_place(self, blob: np.ndarray, out_edges: list, k: int,
                         i0: int, n_consumed: int) -> None:
        """Split blob (Dl, d..., Dr) into sites and splice them into the MPS."""
        new_sites: list[_Site] = []
        m = len(out_edges)
        for i, e in enumerate(out_edges):
            if i == m - 1:
                new_sites.append(_Site(edge=e, dst=self._other(e, k), array=blob))
                break
            dl, d = blob.shape[0], blob.shape[1]
            rest = blob.shape[2:]
            left, right = _svd_split(blob.reshape(dl * d, -1), self.max_bond)
            left = self._rescale(left)
            new_sites.append(_Site(edge=e, dst=self._other(e, k),
                                   array=left.reshape(dl, d, -1)))
            blob = right.reshape((right.shape[0],) + rest)

        if m > 0 and n_consumed == 0 and 0 < i0 < len(self.sites):
            bond = self.sites[i0 - 1].array.shape[-1]
            if bond != 1:
                # thread an identity through the inserted chain so the cut
                # bond of the host MPS passes around the new component
                eye = np.eye(bond)
                for site in new_sites:
                    a = site.array
                    dl, d, dr = a.shape
                    site.array = np.einsum("ldr,bc->bldcr", a, eye).reshape(
                        bond * dl, d, bond * dr)

        self.sites[i0:i0 + n_consumed] = new_sites

        if m == 0:
            mat = blob.reshape(blob.shape[0], blob.shape[-1])
            if not self.sites:
                if mat.size != 1:
                    raise NumericalFailureError("dangling bonds left at the end of the sweep")
                self.scalar *= float(mat[0, 0])
            elif i0 > 0:
                left_site = self.sites[i0 - 1]
                left_site.array = self._rescale(
                    np.tensordot(left_site.array, mat, axes=([2], [0])))
            else:
                right_site = self.sites[0]
                right_site.array = self._rescale(
                    np.tensordot(mat, right_site.array, axes=([1], [0])))

    def run(self) -> tuple[float, float]:
        order = sorted(range(len(self.tensors)), key=lambda k: (self.xs[k], k))
        for k in order:
            tensor = np.asarray(self.tensors[k], dtype=float)
            my_legs = list(self.legs[k])
            x_now = self.xs[k]
            incoming = [i for i, site in enumerate(self.sites) if site.dst == k]

            if incoming:
                if incoming != list(range(incoming[0], incoming[0] + len(incoming))):
                    raise NumericalFailureError(
                        "sweep lost planarity: incoming edges are not contiguous")
                i0, n_in = incoming[0], len(incoming)
                blob = self.sites[i0].array
                in_edges = [self.sites[i0].edge]
                for i in range(i0 + 1, i0 + n_in):
                    blob = np.tensordot(blob, self.sites[i].array,
                                        axes=([blob.ndim - 1], [0]))
                    in_edges.append(self.sites[i].edge)
                axes_blob = [1 + in_edges.index(e) for e in my_legs if e in in_edges]
                axes_t = [i for i, e in enumerate(my_legs) if e in in_edges]
                blob = np.tensordot(blob, tensor, axes=(axes_blob, axes_t))
                out_edges = [e for e in my_legs if e not in in_edges]
                mm = len(out_edges)
                blob = np.transpose(blob, [0] + list(range(2, 2 + mm)) + [1])
            else:
                i0, n_in = 0, 0
                y_here = self.pos[k][1]
                while (i0 < len(self.sites)
                       and self._crossing_y(self.sites[i0], x_now) < y_here):
                    i0 += 1
                out_edges = list(my_legs)
                blob = tensor[None, ..., None]

            def slope(e):
                dst = self._other(e, k)
                dx = self.xs[dst] - x_now
                dy = self.pos[dst][1] - self.pos[k][1]
                return dy / dx if dx != 0 else math.inf

            sort_idx = sorted(range(len(out_edges)), key=lambda i: slope(out_edges[i]))
            out_edges = [out_edges[i] for i in sort_idx]
            blob = np.transpose(blob, [0] + [1 + i for i in sort_idx] + [blob.ndim - 1])
            blob = self._rescale(blob)
            self._split_and_place(blob, out_edges, k, i0, n_in)

        if self.sites:
            raise NumericalFailureError("open edges remain after sweeping every tensor")
        if self.scalar == 0.0:
            raise _ExactZero
        if not math.isfinite(self.scalar):
            raise NumericalFailureError(f"contraction returned scalar {self.scalar}")
        return self.log_scale + math.log(abs(self.scalar)), math.copysign(1.0, self.scalar)


def contract_planar(tensors, legs, positions, max_bond: int = 0) -> tuple[float, float]:
    """Contract a closed planar network to a scalar; see the module docstring.

    Returns (log|Z|, sign); an exactly-zero value comes back as (-inf, 1.0).
    """
    try:
        return _PlanarSweep(tensors, legs, positions, max_bond).run()
    except _ExactZero:
        return -math.inf, 1.0
