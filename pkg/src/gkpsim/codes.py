"""Constructors for every supported GKP code family.

Families
--------
* ``square-single`` / ``hex-single``: one-mode GKP codes (d = 1).
* ``surface-square``: rotated surface code (N = d^2 qubits on a d x d grid,
  row-major indexing) concatenated with the square GKP code.
* ``color-square`` / ``color-hex``: triangular 6.6.6 color code
  (N = (3 d^2 + 1)/4) concatenated with the square / hexagonal GKP code.
* ``five-one-three-hex``: the [[5,1,3]] code concatenated with the hexagonal
  GKP code.

Rotated surface geometry
------------------------
Qubits sit at (row a, col b), 0 <= a, b < d, index i = a*d + b.  Faces F(a, b)
cover qubits {(a,b), (a,b+1), (a+1,b), (a+1,b+1)} clipped to the grid.
X stabilizers are the interior faces with (a+b) odd plus weight-2 half faces
on the left and right boundaries; Z stabilizers are the interior faces with
(a+b) even plus half faces on the top and bottom boundaries.  Logical X is
the horizontal q-type string on row 0; logical Z is the vertical string on
column 0.

Triangular color geometry
-------------------------
Sites live at axial coordinates (q, r) with q, r >= 0 and q + r <= L where
L = 3(d-1)/2.  Sites with (q - r) = 1 (mod 3) are faces; the remaining sites
are qubits.  Each face acts on its <= 6 neighbouring qubits, carrying both an
X-type and a Z-type stabilizer on the same support.  Both logical operators
use the all-ones support.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .f2 import enumerate_group, rank_f2
from .lattice import check_symplectic, pairing_parity

SQRT_PI = math.sqrt(math.pi)


class CodeFamily(enum.Enum):
    SQUARE_SINGLE = "square-single"
    HEX_SINGLE = "hex-single"
    SURFACE_SQUARE = "surface-square"
    COLOR_SQUARE = "color-square"
    COLOR_HEX = "color-hex"
    FIVE_ONE_THREE_HEX = "five-one-three-hex"

    @staticmethod
    def from_name(name: str) -> "CodeFamily":
        for fam in CodeFamily:
            if fam.value == name:
                return fam
        raise InvalidParameterError(f"unknown code family {name!r}")


_SINGLE_MODE = (CodeFamily.SQUARE_SINGLE, CodeFamily.HEX_SINGLE)
_HEX_INNER = (CodeFamily.HEX_SINGLE, CodeFamily.COLOR_HEX, CodeFamily.FIVE_ONE_THREE_HEX)


def hexagonal_inner_symplectic() -> np.ndarray:
    """The fixed 2x2 symplectic matrix of the one-mode hexagonal code.

    The generated single-mode lattice 2*sqrt(pi)*S*Z^2 is hexagonal with
    shortest vector 2*sqrt(pi)*(2/sqrt(3))^(1/2) and Gram matrix proportional
    to [[2, -1], [-1, 2]]; det S = 1 so S is symplectic.
    """
    kappa = math.sqrt(2.0 / math.sqrt(3.0))
    s = kappa * np.array([[1.0, -0.5], [0.0, math.sqrt(3.0) / 2.0]])
    return check_symplectic(s)


def _interleave(x_bits: np.ndarray, z_bits: np.ndarray) -> np.ndarray:
    """Frame-binary vector with q components x_bits and p components z_bits."""
    x_bits = np.asarray(x_bits, dtype=np.uint8)
    z_bits = np.asarray(z_bits, dtype=np.uint8)
    out = np.zeros(2 * x_bits.size, dtype=np.uint8)
    out[0::2] = x_bits
    out[1::2] = z_bits
    return out


def _pauli_string_to_frame(pauli: str) -> np.ndarray:
    x_bits = [1 if c in "XY" else 0 for c in pauli]
    z_bits = [1 if c in "ZY" else 0 for c in pauli]
    return _interleave(np.array(x_bits), np.array(z_bits))


@dataclass
class GkpCodeLayout:
    """A concatenated GKP code: inner symplectic frame plus outer qubit code.

    ``stabilizer_generators`` are binary vectors of length 2N in the inner
    frame, interleaved (x_1, z_1, ..., x_N, z_N); for CSS families the pure
    X-type and Z-type supports are also kept separately.  ``index_map`` makes
    the (here trivial) outer-qubit -> mode association explicit.
    """

    family: CodeFamily
    d: int
    n_modes: int
    inner_symplectic: np.ndarray
    stabilizer_generators: np.ndarray
    logical_x: np.ndarray
    logical_z: np.ndarray
    x_stabilizers: np.ndarray | None = None
    z_stabilizers: np.ndarray | None = None
    index_map: tuple = ()
    qubit_coords: tuple = ()
    face_coords: tuple = ()

    def __post_init__(self):
        if not self.index_map:
            self.index_map = tuple(range(self.n_modes))
        self.inner_symplectic = check_symplectic(self.inner_symplectic)
        b = SQRT_PI * self.inner_symplectic
        self._frame_block = b
        self._frame_block_inv = np.linalg.inv(b)

    # -- frame transforms -------------------------------------------------

    def to_frame(self, v: np.ndarray) -> np.ndarray:
        """Quadrature coordinates -> inner-frame coordinates (per mode)."""
        v = np.asarray(v, dtype=float)
        pairs = v.reshape(v.shape[:-1] + (self.n_modes, 2))
        return (pairs @ self._frame_block_inv.T).reshape(v.shape)

    def from_frame(self, c: np.ndarray) -> np.ndarray:
        """Inner-frame coordinates -> quadrature coordinates."""
        c = np.asarray(c, dtype=float)
        pairs = c.reshape(c.shape[:-1] + (self.n_modes, 2))
        return (pairs @ self._frame_block.T).reshape(c.shape)

    # -- derived binary data ----------------------------------------------

    @property
    def logical_x_frame(self) -> np.ndarray:
        return _interleave(self.logical_x, np.zeros(self.n_modes, dtype=np.uint8))

    @property
    def logical_z_frame(self) -> np.ndarray:
        return _interleave(np.zeros(self.n_modes, dtype=np.uint8), self.logical_z)

    def logical_frame(self, cls) -> np.ndarray:
        """Frame-binary representative of a logical class."""
        rep = np.zeros(2 * self.n_modes, dtype=np.uint8)
        if cls.x_bit:
            rep ^= self.logical_x_frame
        if cls.z_bit:
            rep ^= self.logical_z_frame
        return rep

    @property
    def is_square_inner(self) -> bool:
        return np.allclose(self.inner_symplectic, np.eye(2))

    @property
    def is_css(self) -> bool:
        return self.x_stabilizers is not None and self.z_stabilizers is not None

    def stabilizer_group_frame(self) -> np.ndarray:
        """Every element of the stabilizer group as frame-binary vectors."""
        return enumerate_group(self.stabilizer_generators)

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        n = self.n_modes
        gens = self.stabilizer_generators
        if gens.shape != (n - 1, 2 * n):
            raise InvalidParameterError(
                f"expected {n - 1} stabilizer generators of length {2 * n}, got {gens.shape}")
        if rank_f2(gens) != n - 1 and n > 1:
            raise InvalidParameterError("stabilizer generators are not independent")
        for i in range(gens.shape[0]):
            par = pairing_parity(gens[i], gens)
            if par.any():
                raise InvalidParameterError("stabilizer generators do not commute")
        lx, lz = self.logical_x_frame, self.logical_z_frame
        if gens.size and (pairing_parity(gens, lx).any() or pairing_parity(gens, lz).any()):
            raise InvalidParameterError("logical operators do not commute with stabilizers")
        if not pairing_parity(lx, lz):
            raise InvalidParameterError("logical X and Z must anticommute")
        expected = {
            CodeFamily.SQUARE_SINGLE: 1,
            CodeFamily.HEX_SINGLE: 1,
            CodeFamily.FIVE_ONE_THREE_HEX: 5,
            CodeFamily.SURFACE_SQUARE: self.d * self.d,
            CodeFamily.COLOR_SQUARE: (3 * self.d * self.d + 1) // 4,
            CodeFamily.COLOR_HEX: (3 * self.d * self.d + 1) // 4,
        }[self.family]
        if n != expected:
            raise InvalidParameterError(f"{self.family.value} with d={self.d} must have N={expected}")

    # -- serialization -------------------------------------------------------

    def to_json_dict(self) -> dict:
        doc = {
            "family": self.family.value,
            "d": self.d,
            "n_modes": self.n_modes,
            "inner_symplectic": self.inner_symplectic.tolist(),
            "stabilizer_generators": self.stabilizer_generators.tolist(),
            "logical_x": self.logical_x.tolist(),
            "logical_z": self.logical_z.tolist(),
            "index_map": list(self.index_map),
        }
        if self.x_stabilizers is not None:
            doc["x_stabilizers"] = self.x_stabilizers.tolist()
            doc["z_stabilizers"] = self.z_stabilizers.tolist()
        if self.qubit_coords:
            doc["qubit_coords"] = [list(c) for c in self.qubit_coords]
        if self.face_coords:
            doc["face_coords"] = [list(c) for c in self.face_coords]
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=1)

    @staticmethod
    def from_json_dict(doc: dict) -> "GkpCodeLayout":
        n = doc["n_modes"]
        layout = GkpCodeLayout(
            family=CodeFamily.from_name(doc["family"]),
            d=doc["d"],
            n_modes=n,
            inner_symplectic=np.array(doc["inner_symplectic"], dtype=float),
            stabilizer_generators=np.array(
                doc["stabilizer_generators"], dtype=np.uint8).reshape(-1, 2 * n),
            logical_x=np.array(doc["logical_x"], dtype=np.uint8),
            logical_z=np.array(doc["logical_z"], dtype=np.uint8),
            x_stabilizers=(np.array(doc["x_stabilizers"], dtype=np.uint8).reshape(-1, n)
                           if "x_stabilizers" in doc else None),
            z_stabilizers=(np.array(doc["z_stabilizers"], dtype=np.uint8).reshape(-1, n)
                           if "z_stabilizers" in doc else None),
            index_map=tuple(doc["index_map"]),
            qubit_coords=tuple(tuple(c) for c in doc.get("qubit_coords", ())),
            face_coords=tuple(tuple(c) for c in doc.get("face_coords", ())),
        )
        layout.validate()
        return layout

    @staticmethod
    def from_json(text: str) -> "GkpCodeLayout":
        return GkpCodeLayout.from_json_dict(json.loads(text))


# ---------------------------------------------------------------------------
# rotated surface code
# ---------------------------------------------------------------------------


def _surface_supports(d: int):
    """(x_supports, z_supports) of the rotated distance-d surface code."""

    def face(a, b):
        qubits = []
        for da in (0, 1):
            for db in (0, 1):
                aa, bb = a + da, b + db
                if 0 <= aa < d and 0 <= bb < d:
                    qubits.append(aa * d + bb)
        return qubits

    x_supports, z_supports = [], []
    for a in range(d - 1):
        for b in range(d - 1):
            (x_supports if (a + b) % 2 else z_supports).append(face(a, b))
    for a in range(d - 1):
        if a % 2 == 0:
            x_supports.append(face(a, -1))          # left boundary
        if (a + d - 1) % 2:
            x_supports.append(face(a, d - 1))       # right boundary
    for b in range(d - 1):
        if (b - 1) % 2 == 0:
            z_supports.append(face(-1, b))          # top boundary
        if (d - 1 + b) % 2 == 0:
            z_supports.append(face(d - 1, b))       # bottom boundary

    def to_matrix(supports):
        mat = np.zeros((len(supports), d * d), dtype=np.uint8)
        for i, sup in enumerate(supports):
            mat[i, sup] = 1
        return mat

    return to_matrix(x_supports), to_matrix(z_supports)


def surface_z_permutation(d: int) -> np.ndarray:
    """Qubit permutation of the 90-degree rotation (a, b) -> (b, d-1-a).

    Entry i of the result is the new index of original qubit i.  Applying it
    to the Z-side data maps the Z-stabilizer pattern onto the X pattern.
    """
    perm = np.empty(d * d, dtype=np.int64)
    for a in range(d):
        for b in range(d):
            perm[a * d + b] = b * d + (d - 1 - a)
    return perm


def z_side_layout(layout: GkpCodeLayout) -> GkpCodeLayout:
    """Exchange X and Z roles of a surface-square layout via the 90-degree rotation."""
    if layout.family is not CodeFamily.SURFACE_SQUARE:
        raise InvalidParameterError("z_side_layout applies to surface-square layouts only")
    d = layout.d
    perm = surface_z_permutation(d)

    def permute(mat):
        out = np.zeros_like(mat)
        out[..., perm] = mat
        return out

    x_stabs = permute(layout.z_stabilizers)
    z_stabs = permute(layout.x_stabilizers)
    gens = np.vstack([
        _interleave(s, np.zeros(d * d, dtype=np.uint8)) for s in x_stabs
    ] + [
        _interleave(np.zeros(d * d, dtype=np.uint8), s) for s in z_stabs
    ])
    rotated = GkpCodeLayout(
        family=CodeFamily.SURFACE_SQUARE,
        d=d,
        n_modes=d * d,
        inner_symplectic=np.eye(2),
        stabilizer_generators=gens,
        logical_x=permute(layout.logical_z),
        logical_z=permute(layout.logical_x),
        x_stabilizers=x_stabs,
        z_stabilizers=z_stabs,
    )
    rotated.validate()
    return rotated


# ---------------------------------------------------------------------------
# rotated -> unrotated embedding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnrotatedEmbedding:
    """Embedding of the rotated d x d code into the unrotated surface code.

    The unrotated code has N' = d^2 + (d-1)^2 data qubits at checkerboard
    positions (r, c), r + c even, on a (2d-1) x (2d-1) grid; its X-type site
    stabilizers sit at (r even, c odd).  Rotated qubit (a, b) maps to
    (a + b, b - a + d - 1).  Unmapped qubits on the diagonals r + c = d - 3
    and r + c = 3d - 1 (adjacent to the embedded block in the top-left and
    bottom-right corners) carry weight one; all other unmapped qubits carry
    weight zero so the extra site stabilizers drop out of the partition sum.
    """

    d: int
    coords: tuple                # (N',) data-qubit positions, sorted
    mapped_index: np.ndarray     # (N',) rotated qubit index or -1
    forced_one: np.ndarray       # (N',) bool
    forced_zero: np.ndarray      # (N',) bool

    @property
    def n_prime(self) -> int:
        return len(self.coords)

    def weights(self, mapped_values: np.ndarray) -> np.ndarray:
        """Per-unrotated-qubit weights from per-rotated-qubit values.

        mapped_values has shape (..., d^2); the result has shape (..., N')
        with forced entries set to one and zero.
        """
        vals = np.asarray(mapped_values, dtype=float)
        out = np.zeros(vals.shape[:-1] + (self.n_prime,), dtype=float)
        sel = self.mapped_index >= 0
        out[..., sel] = vals[..., self.mapped_index[sel]]
        out[..., self.forced_one] = 1.0
        return out


def embed_rotated_into_unrotated(d: int) -> UnrotatedEmbedding:
    if d < 3 or d % 2 == 0:
        raise InvalidParameterError(f"embedding requires odd d >= 3, got {d}")
    size = 2 * d - 1
    coords = [(r, c) for r in range(size) for c in range(size) if (r + c) % 2 == 0]
    pos_to_idx = {rc: i for i, rc in enumerate(coords)}
    n_prime = len(coords)
    mapped_index = np.full(n_prime, -1, dtype=np.int64)
    for a in range(d):
        for b in range(d):
            mapped_index[pos_to_idx[(a + b, b - a + d - 1)]] = a * d + b
    forced_one = np.zeros(n_prime, dtype=bool)
    forced_zero = np.zeros(n_prime, dtype=bool)
    for i, (r, c) in enumerate(coords):
        if mapped_index[i] >= 0:
            continue
        if r + c == d - 3 or r + c == 3 * d - 1:
            forced_one[i] = True
        else:
            forced_zero[i] = True
    return UnrotatedEmbedding(d=d, coords=tuple(coords), mapped_index=mapped_index,
                              forced_one=forced_one, forced_zero=forced_zero)


def unrotated_x_sites(d: int):
    """X-site stabilizer positions of the unrotated code with adjacent data indices.

    Returns (sites, adjacency) where sites[k] = (r, c) with r even and c odd,
    and adjacency[k] lists indices into the embedding's coords.
    """
    size = 2 * d - 1
    emb_coords = [(r, c) for r in range(size) for c in range(size) if (r + c) % 2 == 0]
    pos_to_idx = {rc: i for i, rc in enumerate(emb_coords)}
    sites, adjacency = [], []
    for r in range(0, size, 2):
        for c in range(1, size, 2):
            neigh = [pos_to_idx[p] for p in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1))
                     if p in pos_to_idx]
            sites.append((r, c))
            adjacency.append(neigh)
    return sites, adjacency


# ---------------------------------------------------------------------------
# triangular 6.6.6 color code
# ---------------------------------------------------------------------------


def _color_sites(d: int):
    """(qubit_sites, face_sites) in axial coordinates for the distance-d code."""
    L = 3 * (d - 1) // 2
    qubits, faces = [], []
    for r in range(L + 1):
        for q in range(L + 1 - r):
            (faces if (q - r) % 3 == 1 else qubits).append((q, r))
    return qubits, faces


def _color_supports(d: int):
    qubit_sites, face_sites = _color_sites(d)
    idx = {site: i for i, site in enumerate(qubit_sites)}
    supports = []
    for (q, r) in face_sites:
        neigh = [(q + 1, r), (q - 1, r), (q, r + 1), (q, r - 1), (q + 1, r - 1), (q - 1, r + 1)]
        supports.append(sorted(idx[s] for s in neigh if s in idx))
    mat = np.zeros((len(face_sites), len(qubit_sites)), dtype=np.uint8)
    for i, sup in enumerate(supports):
        mat[i, sup] = 1
    return qubit_sites, face_sites, mat


def axial_to_cartesian(site) -> tuple:
    q, r = site
    return (q + 0.5 * r, r * math.sqrt(3.0) / 2.0)


# ---------------------------------------------------------------------------
# [[5,1,3]] code
# ---------------------------------------------------------------------------

FIVE_ONE_THREE_GENERATORS = ("IXZZX", "XIXZZ", "ZXIXZ", "ZZXIX")


# ---------------------------------------------------------------------------
# build_layout
# ---------------------------------------------------------------------------


def build_layout(family: CodeFamily | str, d: int = 1) -> GkpCodeLayout:
    """Construct and validate a layout for the requested (family, d)."""
    if isinstance(family, str):
        family = CodeFamily.from_name(family)
    if d < 1 or d % 2 == 0:
        raise InvalidParameterError(f"distance must be odd and positive, got {d}")
    if family in _SINGLE_MODE or family is CodeFamily.FIVE_ONE_THREE_HEX:
        if d != 1 and family in _SINGLE_MODE:
            raise InvalidParameterError(f"{family.value} only supports d=1")
        if family is CodeFamily.FIVE_ONE_THREE_HEX and d not in (1, 3):
            raise InvalidParameterError("five-one-three-hex has a fixed distance")
    elif d < 3:
        raise InvalidParameterError(f"{family.value} requires d >= 3")

    inner = hexagonal_inner_symplectic() if family in _HEX_INNER else np.eye(2)

    if family in _SINGLE_MODE:
        layout = GkpCodeLayout(
            family=family, d=1, n_modes=1, inner_symplectic=inner,
            stabilizer_generators=np.zeros((0, 2), dtype=np.uint8),
            logical_x=np.ones(1, dtype=np.uint8), logical_z=np.ones(1, dtype=np.uint8),
            x_stabilizers=np.zeros((0, 1), dtype=np.uint8),
            z_stabilizers=np.zeros((0, 1), dtype=np.uint8),
        )
    elif family is CodeFamily.FIVE_ONE_THREE_HEX:
        gens = np.vstack([_pauli_string_to_frame(p) for p in FIVE_ONE_THREE_GENERATORS])
        layout = GkpCodeLayout(
            family=family, d=3, n_modes=5, inner_symplectic=inner,
            stabilizer_generators=gens,
            logical_x=np.ones(5, dtype=np.uint8), logical_z=np.ones(5, dtype=np.uint8),
        )
    elif family is CodeFamily.SURFACE_SQUARE:
        n = d * d
        x_stabs, z_stabs = _surface_supports(d)
        zeros = np.zeros(n, dtype=np.uint8)
        gens = np.vstack([_interleave(s, zeros) for s in x_stabs]
                         + [_interleave(zeros, s) for s in z_stabs])
        logical_x = np.zeros(n, dtype=np.uint8)
        logical_x[0:d] = 1                       # row 0
        logical_z = np.zeros(n, dtype=np.uint8)
        logical_z[0::d] = 1                      # column 0
        layout = GkpCodeLayout(
            family=family, d=d, n_modes=n, inner_symplectic=inner,
            stabilizer_generators=gens, logical_x=logical_x, logical_z=logical_z,
            x_stabilizers=x_stabs, z_stabilizers=z_stabs,
            qubit_coords=tuple((a, b) for a in range(d) for b in range(d)),
        )
    else:  # color families
        qubit_sites, face_sites, faces = _color_supports(d)
        n = len(qubit_sites)
        zeros = np.zeros(n, dtype=np.uint8)
        gens = np.vstack([_interleave(s, zeros) for s in faces]
                         + [_interleave(zeros, s) for s in faces])
        layout = GkpCodeLayout(
            family=family, d=d, n_modes=n, inner_symplectic=inner,
            stabilizer_generators=gens,
            logical_x=np.ones(n, dtype=np.uint8), logical_z=np.ones(n, dtype=np.uint8),
            x_stabilizers=faces, z_stabilizers=faces.copy(),
            qubit_coords=tuple(qubit_sites), face_coords=tuple(face_sites),
        )

    layout.validate()
    return layout


def single_mode_equivalent(family: CodeFamily) -> CodeFamily:
    """The d=1 member of a concatenated family's sweep (square or hex inner code)."""
    return CodeFamily.HEX_SINGLE if family in _HEX_INNER else CodeFamily.SQUARE_SINGLE


def stabilizer_lattice_vector(layout: GkpCodeLayout, rng: np.random.Generator) -> np.ndarray:
    """A random element of sqrt(2 pi) Lambda in quadrature coordinates."""
    gens = layout.stabilizer_generators
    if gens.shape[0]:
        picks = rng.integers(0, 2, size=gens.shape[0]).astype(np.uint8)
        g = (picks @ gens) % 2
    else:
        g = np.zeros(2 * layout.n_modes, dtype=np.uint8)
    v = rng.integers(-3, 4, size=2 * layout.n_modes)
    return layout.from_frame(g + 2.0 * v)
