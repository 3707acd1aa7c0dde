"""Surface-code construction: standard and rotated layouts, Y-type operators.

Standard layout conventions (all 1-based):
  * Horizontal-edge qubits H(i,c), i in 1..j, c in 1..k, at doubled
    coordinates (2i-1, 2c-1).
  * Vertical-edge qubits V(i,c), i in 2..j, c in 1..k-1, at (2i-2, 2c).
  * Vertex (X) checks at (2i-1, 2c) for i in 1..j, c in 1..k-1; plaquette
    (Z) checks at (2i, 2c-1) for i in 1..j-1, c in 1..k.
  * Qubits are indexed row-major by doubled coordinate, so serialized
    operators are bit-exact across runs.

Rotated layout conventions (j, k odd): qubits (r,c) on a j x k grid,
row-major; checks sit on faces (a,b) with a in 0..j, b in 0..k, touching the
grid corners of the face.  A face is X-type iff a+b is odd.  Interior faces
are always present; top/bottom boundary faces only when Z-type, left/right
only when X-type, so X strings terminate on the left/right boundaries.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .gf2 import BitMatrix, Gf2Solver, rank
from .pauli import PauliOperator

__all__ = [
    "CodeFamily",
    "StabilizerCode",
    "build_standard_code",
    "build_rotated_code",
    "syndrome",
    "y_distance",
    "y_logical_count",
    "construct_y_logical",
    "construct_y_stabilizer_group",
    "propagate_y_from_top",
]


@dataclass(frozen=True)
class CodeFamily:
    """Family classification of a j x k code: square, coprime, gcd_g, or rotated_odd."""

    tag: str
    g: int

    @classmethod
    def classify(cls, j: int, k: int, layout: str) -> "CodeFamily":
        g = math.gcd(j, k)
        if layout == "rotated":
            return cls("rotated_odd", g)
        if j == k:
            return cls("square", g)
        if g == 1:
            return cls("coprime", g)
        return cls("gcd_g", g)


class StabilizerCode:
    """A surface code instance: check matrices, coordinates, and logicals."""

    def __init__(
        self,
        layout: str,
        j: int,
        k: int,
        qubit_coords: tuple[tuple[int, int], ...],
        x_checks: BitMatrix,
        z_checks: BitMatrix,
        x_check_coords: tuple[tuple[int, int], ...],
        z_check_coords: tuple[tuple[int, int], ...],
        logical_x: PauliOperator,
        logical_z: PauliOperator,
    ):
        self.layout = layout
        self.j = j
        self.k = k
        self.n = len(qubit_coords)
        self.qubit_coords = qubit_coords
        self.x_checks = x_checks
        self.z_checks = z_checks
        self.x_check_coords = x_check_coords
        self.z_check_coords = z_check_coords
        self.logical_x = logical_x
        self.logical_z = logical_z
        self.family = CodeFamily.classify(j, k, layout)
        self._validate()

    # -- derived structure -------------------------------------------------

    @cached_property
    def x_dense(self) -> np.ndarray:
        return self.x_checks.to_dense()

    @cached_property
    def z_dense(self) -> np.ndarray:
        return self.z_checks.to_dense()

    @cached_property
    def y_check_matrix(self) -> BitMatrix:
        """Incidence of every check on every qubit: the parity map seen by Y-type errors."""
        return self.x_checks.stack(self.z_checks)

    @cached_property
    def y_solver(self) -> Gf2Solver:
        return Gf2Solver(self.y_check_matrix)

    @cached_property
    def logical_y(self) -> PauliOperator:
        return construct_y_logical(self)

    @property
    def num_x_checks(self) -> int:
        return self.x_checks.rows

    @property
    def num_z_checks(self) -> int:
        return self.z_checks.rows

    @property
    def num_checks(self) -> int:
        return self.num_x_checks + self.num_z_checks

    @property
    def id(self) -> str:
        return f"{self.layout}-{self.j}x{self.k}"

    @property
    def x_distance(self) -> int:
        return self.k if self.layout == "rotated" else self.j

    @property
    def z_distance(self) -> int:
        return self.j if self.layout == "rotated" else self.k

    @property
    def y_dist(self) -> int:
        return y_distance(self.j, self.k, self.layout)

    def _validate(self) -> None:
        expected_n = self.j * self.k if self.layout == "rotated" else 2 * self.j * self.k - self.j - self.k + 1
        if self.n != expected_n:
            raise AssertionError(f"{self.id}: qubit count {self.n} != {expected_n}")
        if self.num_checks != self.n - 1:
            raise AssertionError(f"{self.id}: {self.num_checks} checks != n-1 = {self.n - 1}")
        # CSS commutation: every X-check support must overlap every Z-check evenly.
        overlap = (self.x_dense.astype(np.uint64) @ self.z_dense.T.astype(np.uint64)) & 1
        if overlap.any():
            raise AssertionError(f"{self.id}: non-commuting check pair")
        if ((self.z_dense @ self.logical_x.x_bits.astype(np.uint64)) & 1).any():
            raise AssertionError(f"{self.id}: logical X anticommutes with a Z check")
        if ((self.x_dense @ self.logical_z.z_bits.astype(np.uint64)) & 1).any():
            raise AssertionError(f"{self.id}: logical Z anticommutes with an X check")
        if self.logical_x.commutes_with(self.logical_z):
            raise AssertionError(f"{self.id}: logical X and Z must anticommute")

    # -- standard-layout coordinate helpers --------------------------------

    def h_index(self, i: int, c: int) -> int:
        """Index of horizontal-edge qubit H(i,c) on a standard-layout code."""
        return self._h_index[(i, c)]

    def v_index(self, i: int, c: int) -> int:
        """Index of vertical-edge qubit V(i,c) on a standard-layout code."""
        return self._v_index[(i, c)]

    def qubit_index(self, r: int, c: int) -> int:
        """Index of qubit (r,c) on a rotated-layout code."""
        if self.layout != "rotated":
            raise ValueError("qubit_index is a rotated-layout accessor")
        return (r - 1) * self.k + (c - 1)

    def to_json(self) -> str:
        lines = ["".join(map(str, row)) for row in self.x_dense]
        zlines = ["".join(map(str, row)) for row in self.z_dense]
        return json.dumps(
            {
                "layout": self.layout,
                "j": self.j,
                "k": self.k,
                "n": self.n,
                "x_checks": lines,
                "z_checks": zlines,
                "logical_x": self.logical_x.to_string(),
                "logical_z": self.logical_z.to_string(),
            }
        )

    def __repr__(self) -> str:
        return f"StabilizerCode({self.id}, n={self.n})"


def build_standard_code(j: int, k: int) -> StabilizerCode:
    """Standard j x k surface code with n = 2jk - j - k + 1 qubits."""
    if j < 2 or k < 2:
        raise ValueError(f"standard layout needs j, k >= 2, got ({j}, {k})")
    coords: list[tuple[int, int]] = []
    h_index: dict[tuple[int, int], int] = {}
    v_index: dict[tuple[int, int], int] = {}
    for dr in range(1, 2 * j):
        if dr % 2 == 1:
            i = (dr + 1) // 2
            for c in range(1, k + 1):
                h_index[(i, c)] = len(coords)
                coords.append((dr, 2 * c - 1))
        else:
            i = dr // 2 + 1
            for c in range(1, k):
                v_index[(i, c)] = len(coords)
                coords.append((dr, 2 * c))
    n = len(coords)

    x_rows = []
    x_coords = []
    for i in range(1, j + 1):
        for c in range(1, k):
            row = np.zeros(n, dtype=np.uint8)
            row[h_index[(i, c)]] = 1
            row[h_index[(i, c + 1)]] = 1
            if i >= 2:
                row[v_index[(i, c)]] = 1
            if i <= j - 1:
                row[v_index[(i + 1, c)]] = 1
            x_rows.append(row)
            x_coords.append((2 * i - 1, 2 * c))

    z_rows = []
    z_coords = []
    for i in range(1, j):
        for c in range(1, k + 1):
            row = np.zeros(n, dtype=np.uint8)
            row[h_index[(i, c)]] = 1
            row[h_index[(i + 1, c)]] = 1
            if c >= 2:
                row[v_index[(i + 1, c - 1)]] = 1
            if c <= k - 1:
                row[v_index[(i + 1, c)]] = 1
            z_rows.append(row)
            z_coords.append((2 * i, 2 * c - 1))

    lx = np.zeros(n, dtype=np.uint8)
    for i in range(1, j + 1):
        lx[h_index[(i, 1)]] = 1
    lz = np.zeros(n, dtype=np.uint8)
    for c in range(1, k + 1):
        lz[h_index[(1, c)]] = 1

    code = StabilizerCode(
        "standard",
        j,
        k,
        tuple(coords),
        BitMatrix.from_dense(np.array(x_rows, dtype=np.uint8)),
        BitMatrix.from_dense(np.array(z_rows, dtype=np.uint8)),
        tuple(x_coords),
        tuple(z_coords),
        PauliOperator.x_type(lx),
        PauliOperator.z_type(lz),
    )
    code._h_index = h_index
    code._v_index = v_index
    return code


def rotated_face_is_x(a: int, b: int) -> bool:
    return (a + b) % 2 == 1


def rotated_face_included(j: int, k: int, a: int, b: int) -> bool:
    """Whether face (a,b) hosts a check on the rotated j x k code."""
    x_type = rotated_face_is_x(a, b)
    if 1 <= a <= j - 1 and 1 <= b <= k - 1:
        return True
    if (a == 0 or a == j) and 1 <= b <= k - 1:
        return not x_type
    if (b == 0 or b == k) and 1 <= a <= j - 1:
        return x_type
    return False


def rotated_face_qubits(j: int, k: int, a: int, b: int) -> list[tuple[int, int]]:
    return [
        (r, c)
        for r in (a, a + 1)
        for c in (b, b + 1)
        if 1 <= r <= j and 1 <= c <= k
    ]


def build_rotated_code(j: int, k: int) -> StabilizerCode:
    """Rotated j x k surface code (j, k odd) with n = jk qubits."""
    if j < 3 or k < 3:
        raise ValueError(f"rotated layout needs j, k >= 3, got ({j}, {k})")
    if j % 2 == 0 or k % 2 == 0:
        raise ValueError(f"rotated layout needs odd dimensions, got ({j}, {k})")
    n = j * k
    coords = tuple((r, c) for r in range(1, j + 1) for c in range(1, k + 1))

    def qidx(r: int, c: int) -> int:
        return (r - 1) * k + (c - 1)

    x_rows, x_coords, z_rows, z_coords = [], [], [], []
    for a in range(j + 1):
        for b in range(k + 1):
            if not rotated_face_included(j, k, a, b):
                continue
            row = np.zeros(n, dtype=np.uint8)
            for r, c in rotated_face_qubits(j, k, a, b):
                row[qidx(r, c)] = 1
            if rotated_face_is_x(a, b):
                x_rows.append(row)
                x_coords.append((a, b))
            else:
                z_rows.append(row)
                z_coords.append((a, b))

    lx = np.zeros(n, dtype=np.uint8)
    lx[[qidx(1, c) for c in range(1, k + 1)]] = 1
    lz = np.zeros(n, dtype=np.uint8)
    lz[[qidx(r, 1) for r in range(1, j + 1)]] = 1

    return StabilizerCode(
        "rotated",
        j,
        k,
        coords,
        BitMatrix.from_dense(np.array(x_rows, dtype=np.uint8)),
        BitMatrix.from_dense(np.array(z_rows, dtype=np.uint8)),
        tuple(x_coords),
        tuple(z_coords),
        PauliOperator.x_type(lx),
        PauliOperator.z_type(lz),
    )


def syndrome(code: StabilizerCode, e: PauliOperator) -> np.ndarray:
    """Anticommutation bit per generator: X-check bits first, then Z-check bits."""
    if e.n != code.n:
        raise ValueError(f"operator has {e.n} qubits, code has {code.n}")
    sx = (code.x_dense.astype(np.uint64) @ e.z_bits.astype(np.uint64)) & 1
    sz = (code.z_dense.astype(np.uint64) @ e.x_bits.astype(np.uint64)) & 1
    return np.concatenate([sx, sz]).astype(np.uint8)


def y_syndrome_batch(code: StabilizerCode, y_configs: np.ndarray) -> np.ndarray:
    """Syndromes of many Y-type errors given as rows of qubit bits."""
    h = code.y_check_matrix.to_dense().astype(np.uint64)
    return ((y_configs.astype(np.uint64) @ h.T) & 1).astype(np.uint8)


def y_distance(j: int, k: int, layout: str) -> int:
    """Minimum weight of a Y-type logical operator."""
    _validate_dims(j, k, layout)
    if layout == "rotated":
        return j * k
    g = math.gcd(j, k)
    return (2 * g - 1) * (j * k) // (g * g)


def y_logical_count(j: int, k: int, layout: str) -> int:
    """Number of Y-type logical operators."""
    _validate_dims(j, k, layout)
    if layout == "rotated":
        return 1
    return 2 ** (math.gcd(j, k) - 1)


def _validate_dims(j: int, k: int, layout: str) -> None:
    if layout == "standard":
        if j < 2 or k < 2:
            raise ValueError(f"standard layout needs j, k >= 2, got ({j}, {k})")
    elif layout == "rotated":
        if j % 2 == 0 or k % 2 == 0 or j < 3 or k < 3:
            raise ValueError(f"rotated layout needs odd j, k >= 3, got ({j}, {k})")
    else:
        raise ValueError(f"unknown layout {layout!r}")


# -- billiard paths on the doubled lattice ---------------------------------


def _step(j: int, k: int, pos: tuple[int, int], direction: tuple[int, int]):
    """One diagonal step with wall reflection on [0, 2j] x [0, 2k]."""
    r, c = pos
    dr, dc = direction
    if not 0 <= r + dr <= 2 * j:
        dr = -dr
    if not 0 <= c + dc <= 2 * k:
        dc = -dc
    return (r + dr, c + dc), (dr, dc)


def _is_corner(j: int, k: int, pos: tuple[int, int]) -> bool:
    return pos[0] in (0, 2 * j) and pos[1] in (0, 2 * k)


def _collect_support(code: StabilizerCode, visits: list[tuple[int, int]]) -> np.ndarray:
    """Convert a list of visited doubled-lattice points to a mod-2 qubit support."""
    coord_index = {coord: q for q, coord in enumerate(code.qubit_coords)}
    support = np.zeros(code.n, dtype=np.uint8)
    for pos in visits:
        q = coord_index.get(pos)
        if q is not None:
            support[q] ^= 1
    return support


def corner_path_support(code: StabilizerCode) -> np.ndarray:
    """Qubit support of the diagonal billiard path from the top-left corner.

    The path starts at doubled coordinate (0,0), bounces off the lattice
    walls, and ends at the first corner it reaches; its mod-2 visit pattern
    is a minimum-weight Y-type logical operator.
    """
    j, k = code.j, code.k
    pos, direction = (0, 0), (1, 1)
    visits = []
    expected = (2 * j * 2 * k) // math.gcd(2 * j, 2 * k)
    for _ in range(expected):
        pos, direction = _step(j, k, pos, direction)
        visits.append(pos)
    if not _is_corner(j, k, pos):
        raise AssertionError(f"corner path on {code.id} did not close after {expected} steps")
    return _collect_support(code, visits)


def cyclic_path_support(code: StabilizerCode, start: tuple[int, int]) -> np.ndarray:
    """Qubit support of the closed billiard orbit through `start` heading (+1,+1)."""
    j, k = code.j, code.k
    pos, direction = start, (1, 1)
    visits = [start]
    limit = 16 * j * k + 8
    for _ in range(limit):
        pos, direction = _step(j, k, pos, direction)
        if pos == start and direction == (1, 1):
            break
        visits.append(pos)
    else:
        raise AssertionError(f"billiard orbit from {start} on {code.id} did not close")
    return _collect_support(code, visits)


def boundary_destabilizer_support(code: StabilizerCode, c: int) -> np.ndarray:
    """Y-type operator flipping exactly the bottom-row vertex check (j, c).

    Built as the billiard ray from H(j, c+1) heading up-right until it exits
    at a corner; used to clear residual bottom-boundary syndrome on coprime
    codes.
    """
    j, k = code.j, code.k
    pos, direction = (2 * j - 1, 2 * c + 1), (-1, 1)
    visits = [pos]
    limit = 16 * j * k + 8
    for _ in range(limit):
        pos, direction = _step(j, k, pos, direction)
        if _is_corner(j, k, pos):
            break
        visits.append(pos)
    else:
        raise AssertionError(f"destabilizer ray from column {c} on {code.id} did not terminate")
    return _collect_support(code, visits)


def construct_y_logical(code: StabilizerCode) -> PauliOperator:
    """A minimum-weight Y-type logical operator.

    Standard layout: the corner-to-corner billiard path.  Rotated layout:
    Y on every qubit.
    """
    if code.layout == "rotated":
        return PauliOperator.y_type(np.ones(code.n, dtype=np.uint8))
    support = corner_path_support(code)
    op = PauliOperator.y_type(support)
    if op.weight != y_distance(code.j, code.k, code.layout):
        raise AssertionError(f"{code.id}: corner path weight {op.weight} != y-distance")
    if syndrome(code, op).any():
        raise AssertionError(f"{code.id}: corner path operator has nonzero syndrome")
    return op


def construct_y_stabilizer_group(code: StabilizerCode) -> list[PauliOperator]:
    """Independent Y-type stabilizer generators (g-1 of them) of a standard code.

    Generator i is the closed billiard orbit through the i-th qubit of the
    top row, for i = 2..gcd(j,k).
    """
    if code.layout != "standard":
        raise ValueError("Y-type stabilizer generators are a standard-layout construction")
    g = code.family.g
    gens = []
    for i in range(2, g + 1):
        support = cyclic_path_support(code, (1, 2 * i - 1))
        op = PauliOperator.y_type(support)
        if syndrome(code, op).any():
            raise AssertionError(f"{code.id}: orbit generator {i} has nonzero syndrome")
        gens.append(op)
    return gens


# -- zero-filled top-row propagation ---------------------------------------


def propagate_y_from_top(
    j: int,
    k: int,
    top_row: np.ndarray,
    vertex_syndrome: np.ndarray | None = None,
    plaquette_syndrome: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Fill a Y-configuration downward from a given top row of H values.

    Row by row, each vertex check of row i determines the V qubit below it
    and each plaquette check of row i determines the H qubit below it, so
    the result satisfies every requested check except possibly the bottom
    row of vertex checks.

    Arrays are 1-based: returns (yH, yV) with yH[i][c] for i in 1..j,
    c in 1..k and yV[i][c] for i in 2..j, c in 1..k-1; row/column 0 unused.
    Syndromes are (j+1, k) / (j, k+1)-shaped 1-based targets (zeros if None).
    """
    sv = np.zeros((j + 1, k), dtype=np.uint8) if vertex_syndrome is None else vertex_syndrome
    sp = np.zeros((j, k + 1), dtype=np.uint8) if plaquette_syndrome is None else plaquette_syndrome
    yH = np.zeros((j + 1, k + 1), dtype=np.uint8)
    yV = np.zeros((j + 1, k), dtype=np.uint8)
    yH[1, 1:] = top_row
    for i in range(1, j):
        for c in range(1, k):
            above = yV[i, c] if i >= 2 else 0
            yV[i + 1, c] = sv[i, c] ^ yH[i, c] ^ yH[i, c + 1] ^ above
        for c in range(1, k + 1):
            left = yV[i + 1, c - 1] if c >= 2 else 0
            right = yV[i + 1, c] if c <= k - 1 else 0
            yH[i + 1, c] = sp[i, c] ^ yH[i, c] ^ left ^ right
    return yH, yV


def assemble_y_config(code: StabilizerCode, yH: np.ndarray, yV: np.ndarray) -> np.ndarray:
    """Pack 1-based (yH, yV) arrays into a flat qubit bit-vector."""
    y = np.zeros(code.n, dtype=np.uint8)
    for (i, c), q in code._h_index.items():
        y[q] = yH[i, c]
    for (i, c), q in code._v_index.items():
        y[q] = yV[i, c]
    return y
