"""Decoding algorithms and the brute-force maximum-likelihood oracle.

All decoders consume a syndrome (X-check bits then Z-check bits, in check
construction order) and return a :class:`DecodeOutcome`.  Success is always
judged externally by whether recovery * error lies in the stabilizer group;
decoders report argmax classes relative to their own candidate recovery.

Tie-breaking is deterministic everywhere: coset ties prefer I, then X, Y, Z
(or I over L for pure-Y decoding); vote ties in the repetition and cycle
decoders resolve to "no flip".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Mapping

import numpy as np
from scipy.special import logsumexp

from . import tensor
from .codes import (
    StabilizerCode,
    assemble_y_config,
    boundary_destabilizer_support,
    construct_y_stabilizer_group,
    propagate_y_from_top,
    syndrome,
)
from .gf2 import BitMatrix, Gf2Solver, solve
from .noise import BiasedNoiseModel
from .pauli import PauliOperator
from .ycode import CycleCode, YCodeStructure, cycle_code, y_code_structure

__all__ = [
    "DecodeOutcome",
    "UnattainableSyndromeError",
    "repetition_decode",
    "cycle_decode",
    "cycle_decode_batch",
    "cycle_failure_bound",
    "concatenated_y_decode",
    "exact_ml_y_decode",
    "brute_force_ml_decode",
    "mps_decode_rotated",
    "candidate_recovery",
    "ExactYDecoder",
    "ConcatenatedYDecoder",
    "BruteForceDecoder",
    "MpsDecoder",
    "decoder_from_name",
]

_CLASS_ORDER = ("I", "X", "Y", "Z")
_PURE_Y_ORDER = ("I", "L")


class UnattainableSyndromeError(ValueError):
    """The syndrome cannot be produced by any error of the decoder's type."""


@dataclass(frozen=True)
class DecodeOutcome:
    """Recovery operator plus (optionally) per-class log-probability scores."""

    recovery: PauliOperator
    verdict: str | None = None
    coset_scores: dict[str, float] | None = None


def _argmax_class(scores: Mapping[str, float], order: Iterable[str]) -> str:
    order = tuple(order)
    best = order[0]
    best_score = scores[best]
    for label in order[1:]:
        if scores[label] > best_score:
            best, best_score = label, scores[label]
    return best


def logical_class_representatives(code: StabilizerCode) -> dict[str, PauliOperator]:
    return {
        "I": PauliOperator.identity(code.n),
        "X": code.logical_x,
        "Y": code.logical_x.mul(code.logical_z),
        "Z": code.logical_z,
    }


# -- classical decoders ----------------------------------------------------


def repetition_decode(bits: Iterable[int] | np.ndarray) -> int:
    """Majority vote; an exact tie returns 0."""
    arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
    if arr.size == 0:
        raise ValueError("repetition_decode needs at least one bit")
    return int(2 * int(arr.sum()) > arr.size)


@lru_cache(maxsize=None)
def _triangle_edge_indices(m: int) -> np.ndarray:
    code = cycle_code(m)
    return np.array(
        [
            [code.edge_index(a, b), code.edge_index(b, c), code.edge_index(a, c)]
            for (a, b, c) in code.triangles
        ]
    )


def cycle_decode(m: int, triangle_syndromes: Mapping[tuple[int, int, int], int]) -> np.ndarray:
    """Vote-decode the cycle code on K_m.

    Each edge sums the syndromes of the m-2 triangles containing it and is
    flipped iff the sum strictly exceeds (m-2)/2.  The full syndrome map
    (one bit per sorted vertex triple) is required and must be consistent.
    """
    code = cycle_code(m)
    try:
        s = np.array([triangle_syndromes[t] for t in code.triangles], dtype=np.uint8)
    except KeyError as missing:
        raise ValueError(f"missing triangle syndrome for {missing}") from None
    if solve(code.checks, s) is None:
        raise ValueError("inconsistent triangle syndrome set")
    votes = code.checks.to_dense().T.astype(np.int64) @ s.astype(np.int64)
    return (2 * votes > m - 2).astype(np.uint8)


def cycle_decode_batch(m: int, errors: np.ndarray) -> np.ndarray:
    """Decode many error patterns at once; rows are edge bit-vectors.

    Syndromes are generated internally from the errors, so consistency holds
    by construction.  Vote sums run through float32 BLAS in chunks; they are
    small integers (at most m-2 < 2^24), so the arithmetic stays exact.
    """
    code = cycle_code(m)
    te = _triangle_edge_indices(m)
    dense = code.checks.to_dense().astype(np.float32)
    out = np.empty_like(errors)
    chunk = max(256, (64 * 1024 * 1024) // (4 * max(1, len(code.triangles))))
    for lo in range(0, errors.shape[0], chunk):
        block = errors[lo : lo + chunk]
        s = block[:, te[:, 0]] ^ block[:, te[:, 1]] ^ block[:, te[:, 2]]
        votes = s.astype(np.float32) @ dense
        out[lo : lo + chunk] = 2 * votes > m - 2
    return out


def cycle_failure_bound(m: int, p: float) -> float:
    """Analytic bound 2 m^2 exp(-2 eps^2 m), eps = 1/2 - 2p(1-p), clipped to [0,1]."""
    if not 0.0 <= p < 0.5:
        raise ValueError(f"bound requires 0 <= p < 1/2, got {p}")
    eps = 0.5 - 2.0 * p * (1.0 - p)
    return min(1.0, 2.0 * m * m * math.exp(-2.0 * eps * eps * m))


# -- shared Y-decoding machinery ------------------------------------------


def _pure_y_log_score(weights: np.ndarray, n: int, p: float) -> float:
    """log sum of p^w (1-p)^(n-w) over the given coset weights."""
    weights = np.atleast_1d(weights).astype(np.float64)
    if p <= 0.0:
        return 0.0 if (weights == 0).any() else -np.inf
    if p >= 1.0:
        return 0.0 if (weights == n).any() else -np.inf
    return float(logsumexp(weights * math.log(p) + (n - weights) * math.log1p(-p)))


class _StandardYTools:
    """Per-code cache for pure-Y decoding on a standard-layout code."""

    def __init__(self, code: StabilizerCode):
        self.code = code
        self.solver = code.y_solver
        self.logical_bits = code.logical_y.x_bits
        gens = construct_y_stabilizer_group(code)
        g = code.family.g
        if gens:
            gen_matrix = np.stack([op.x_bits for op in gens])
            subset_bits = (
                (np.arange(2 ** len(gens), dtype=np.uint32)[:, None] >> np.arange(len(gens)))
                & 1
            ).astype(np.uint8)
            self.group = (subset_bits @ gen_matrix) & 1
            self.stab_reducer = Gf2Solver(BitMatrix.from_dense(gen_matrix))
        else:
            self.group = np.zeros((1, code.n), dtype=np.uint8)
            self.stab_reducer = None
        # Bottom-row vertex check indices: the only checks a top-row-zero sweep can miss.
        j, k = code.j, code.k
        self.bottom_vertex_indices = np.array(
            [(j - 1) * (k - 1) + (c - 1) for c in range(1, k)]
        )
        if code.family.g == 1:
            self.destabilizers = {
                c: boundary_destabilizer_support(code, c) for c in range(1, k)
            }
            h = code.y_check_matrix.to_dense()
            for c, supp in self.destabilizers.items():
                expected = np.zeros(code.num_checks, dtype=np.uint8)
                expected[(j - 1) * (k - 1) + (c - 1)] = 1
                if not np.array_equal((h @ supp.astype(np.uint64)) & 1, expected):
                    raise AssertionError(
                        f"{code.id}: destabilizer for bottom vertex {c} flips extra checks"
                    )

    def is_stabilizer_config(self, y_bits: np.ndarray) -> bool:
        """Membership of a Y-configuration (already syndrome-free) in the stabilizer group."""
        if not y_bits.any():
            return True
        if self.stab_reducer is None:
            return False
        return not self.stab_reducer.reduce_rowspace_batch(y_bits.reshape(1, -1)).any()

    def candidate(self, s: np.ndarray) -> np.ndarray:
        """Y-configuration with syndrome s, built by top-row-zero propagation.

        The sweep is the product of per-location partial recovery operators;
        its residual syndrome can only sit on the bottom row of vertex
        checks.  Square codes must see the residuals cancel; coprime codes
        clear them with corner-bound destabilizer rays; other families clear
        them with the canonical GF(2) solution.
        """
        code = self.code
        if not self.solver.is_consistent(s):
            raise UnattainableSyndromeError(
                f"{code.id}: syndrome not attainable by a Y-type error"
            )
        j, k = code.j, code.k
        sv = np.zeros((j + 1, k), dtype=np.uint8)
        sp = np.zeros((j, k + 1), dtype=np.uint8)
        for i in range(1, j + 1):
            for c in range(1, k):
                sv[i, c] = s[(i - 1) * (k - 1) + (c - 1)]
        nx = j * (k - 1)
        for i in range(1, j):
            for c in range(1, k + 1):
                sp[i, c] = s[nx + (i - 1) * k + (c - 1)]
        yH, yV = propagate_y_from_top(j, k, np.zeros(k, dtype=np.uint8), sv, sp)
        y = assemble_y_config(code, yH, yV)

        h = code.y_check_matrix.to_dense()
        residual = ((h @ y.astype(np.uint64)) & 1).astype(np.uint8) ^ s
        off_bottom = residual.copy()
        off_bottom[self.bottom_vertex_indices] = 0
        if off_bottom.any():
            raise AssertionError(f"{code.id}: sweep residual off the bottom boundary")
        if code.family.tag == "square":
            if residual.any():
                raise AssertionError(f"{code.id}: square-code residuals failed to cancel")
        elif code.family.g == 1:
            for c in range(1, k):
                if residual[(code.j - 1) * (k - 1) + (c - 1)]:
                    y ^= self.destabilizers[c]
        elif residual.any():
            fix = self.solver.solve(residual)
            if fix is None:
                raise AssertionError(f"{code.id}: residual syndrome unexpectedly inconsistent")
            y ^= fix
        if not np.array_equal(((h @ y.astype(np.uint64)) & 1).astype(np.uint8), s):
            raise AssertionError(f"{code.id}: candidate recovery syndrome mismatch")
        return y

    @cached_property
    def candidate_rows(self) -> np.ndarray:
        """Row q holds the candidate for a single-qubit Y error at qubit q.

        The sweep and every residual-clearing rule are XOR-linear and send
        the zero syndrome to the empty configuration, so the candidate for
        any Y error is the XOR of these rows over its support.  This lets
        batch decoding reuse the exact same candidate (and hence the same
        class labels) as the one-shot path.
        """
        code = self.code
        h = code.y_check_matrix.to_dense()
        rows = np.empty((code.n, code.n), dtype=np.uint8)
        unit = np.zeros(code.n, dtype=np.uint64)
        for q in range(code.n):
            unit[q] = 1
            s = ((h @ unit) & 1).astype(np.uint8)
            rows[q] = self.candidate(s)
            unit[q] = 0
        return rows


@lru_cache(maxsize=32)
def _standard_y_tools(code: StabilizerCode) -> _StandardYTools:
    return _StandardYTools(code)


def exact_ml_y_decode(code: StabilizerCode, model: BiasedNoiseModel, s: np.ndarray) -> DecodeOutcome:
    """Exact maximum-likelihood decoding under pure Y noise.

    Compares the identity coset against the logical coset, each summed over
    all Y-type stabilizers in log domain; ties resolve to the identity
    class.
    """
    if not math.isinf(model.eta):
        raise ValueError("exact_ml_y_decode requires a pure-Y model (eta = inf)")
    s = np.asarray(s, dtype=np.uint8)
    if s.size != code.num_checks:
        raise ValueError(f"syndrome length {s.size} != {code.num_checks}")
    p = model.p
    if code.layout == "rotated":
        if not code.y_solver.is_consistent(s):
            raise UnattainableSyndromeError(f"{code.id}: unattainable pure-Y syndrome")
        y = code.y_solver.solve(s)
        scores = {
            "I": _pure_y_log_score(np.array([y.sum()]), code.n, p),
            "L": _pure_y_log_score(np.array([code.n - y.sum()]), code.n, p),
        }
        verdict = _argmax_class(scores, _PURE_Y_ORDER)
        recovery = y if verdict == "I" else (1 - y).astype(np.uint8)
        return DecodeOutcome(PauliOperator.y_type(recovery), verdict, scores)

    tools = _standard_y_tools(code)
    y = tools.candidate(s)
    weights_i = (tools.group ^ y).sum(axis=1)
    weights_l = (tools.group ^ (y ^ tools.logical_bits)).sum(axis=1)
    scores = {
        "I": _pure_y_log_score(weights_i, code.n, p),
        "L": _pure_y_log_score(weights_l, code.n, p),
    }
    verdict = _argmax_class(scores, _PURE_Y_ORDER)
    recovery = y if verdict == "I" else y ^ tools.logical_bits
    return DecodeOutcome(PauliOperator.y_type(recovery), verdict, scores)


class ExactYDecoder:
    """Pure-Y maximum-likelihood decoder with a vectorized whole-batch path."""

    name = "exact-y"

    def __init__(self, code: StabilizerCode, model: BiasedNoiseModel):
        if not math.isinf(model.eta):
            raise ValueError("ExactYDecoder requires eta = inf")
        self.code = code
        self.model = model
        self.params: dict = {}

    def decode(self, s: np.ndarray) -> DecodeOutcome:
        return exact_ml_y_decode(self.code, self.model, s)

    def decode_batch(self, x_bits: np.ndarray, z_bits: np.ndarray):
        """Decode errors given as (trials, n) bit blocks; returns (success, verdict)."""
        if not np.array_equal(x_bits, z_bits):
            raise ValueError("pure-Y decoder fed a non-Y-type error batch")
        code, p = self.code, self.model.p
        errors = x_bits.astype(np.uint8)
        trials = errors.shape[0]

        if code.layout == "rotated":
            h = code.y_check_matrix.to_dense().astype(np.uint64)
            syndromes = ((errors.astype(np.uint64) @ h.T) & 1).astype(np.uint8)
            cands = code.y_solver.solve_batch(syndromes)
            w = cands.sum(axis=1).astype(np.int64)
            n = code.n
            if p < 0.5:
                take_complement = 2 * w > n
            elif p > 0.5:
                take_complement = 2 * w < n
            else:
                take_complement = np.zeros(trials, dtype=bool)
            diff_weight = (cands ^ errors).sum(axis=1)
            success = np.where(take_complement, diff_weight == n, diff_weight == 0)
            verdicts = np.where(take_complement, "L", "I")
            return success, verdicts

        tools = _standard_y_tools(code)
        cands = ((errors.astype(np.uint64) @ tools.candidate_rows.astype(np.uint64)) & 1).astype(np.uint8)
        group = tools.group
        logical = tools.logical_bits
        n = code.n
        success = np.zeros(trials, dtype=bool)
        verdicts = np.empty(trials, dtype="<U1")
        chunk = max(1, 2_000_000 // max(1, group.shape[0] * n))
        with np.errstate(invalid="ignore"):
            logp = math.log(p) if 0.0 < p else -np.inf
            log1mp = math.log1p(-p) if p < 1.0 else -np.inf
        for lo in range(0, trials, chunk):
            hi = min(trials, lo + chunk)
            cs = cands[lo:hi]
            w_i = (cs[:, None, :] ^ group[None, :, :]).sum(axis=2).astype(np.float64)
            w_l = ((cs ^ logical)[:, None, :] ^ group[None, :, :]).sum(axis=2).astype(np.float64)
            if p <= 0.0:
                score_i = np.where((w_i == 0).any(axis=1), 0.0, -np.inf)
                score_l = np.where((w_l == 0).any(axis=1), 0.0, -np.inf)
            elif p >= 1.0:
                score_i = np.where((w_i == n).any(axis=1), 0.0, -np.inf)
                score_l = np.where((w_l == n).any(axis=1), 0.0, -np.inf)
            else:
                score_i = logsumexp(w_i * logp + (n - w_i) * log1mp, axis=1)
                score_l = logsumexp(w_l * logp + (n - w_l) * log1mp, axis=1)
            take_l = score_l > score_i
            verdicts[lo:hi] = np.where(take_l, "L", "I")
            recoveries = np.where(take_l[:, None], cs ^ logical, cs)
            leftover = recoveries ^ errors[lo:hi]
            if tools.stab_reducer is None:
                success[lo:hi] = ~leftover.any(axis=1)
            else:
                reduced = tools.stab_reducer.reduce_rowspace_batch(leftover)
                success[lo:hi] = ~reduced.any(axis=1)
        return success, verdicts


# -- concatenated decoder --------------------------------------------------


class _ConcatenatedTools:
    """Syndrome-conversion matrices and cut tables for one standard code."""

    def __init__(self, code: StabilizerCode, structure: YCodeStructure):
        self.code = code
        self.structure = structure
        self.solver = code.y_solver
        g = structure.g
        self.cycle = cycle_code(g + 1)

        transpose_solver = Gf2Solver(code.y_check_matrix.transpose())

        def functional(target_bits: np.ndarray) -> np.ndarray:
            u = transpose_solver.solve(target_bits)
            if u is None:
                raise AssertionError(
                    f"{code.id}: required parity functional outside the check row space"
                )
            return u

        def unit(q: int) -> np.ndarray:
            e = np.zeros(code.n, dtype=np.uint8)
            e[q] = 1
            return e

        # Boundary qubits are read out directly by weight-1 combinations.
        self.boundary = np.array(structure.boundary_zero_qubits, dtype=np.int64)
        rows = [functional(unit(q)) for q in self.boundary]
        self.u_boundary = np.array(rows, dtype=np.uint8).reshape(len(rows), code.num_checks)

        # In-block relative bits against each block's reference qubit.
        self.block_members: list[np.ndarray] = []
        self.block_refs: list[int] = []
        rel_rows = []
        self.rel_slices: list[tuple[int, int]] = []
        pos = 0
        for _, members in structure.repetition_blocks:
            members = np.array(members, dtype=np.int64)
            ref = int(members[0])
            self.block_members.append(members)
            self.block_refs.append(ref)
            for q in members[1:]:
                rel_rows.append(functional(unit(ref) ^ unit(int(q))))
            self.rel_slices.append((pos, pos + len(members) - 1))
            pos += len(members) - 1
        self.u_rel = np.array(rel_rows, dtype=np.uint8).reshape(pos, code.num_checks)

        # One parity bit per triangle of K_{g+1}, over block reference qubits.
        edge_to_block = {edge: idx for idx, edge in structure.cycle_edge_map.items()}
        self.block_of_edge = np.array(
            [edge_to_block[e] for e in self.cycle.edges], dtype=np.int64
        )
        tri_rows = []
        for a, b, c in self.cycle.triangles:
            target = np.zeros(code.n, dtype=np.uint8)
            for e in ((a, b), (b, c), (a, c)):
                target ^= unit(self.block_refs[edge_to_block[e]])
            tri_rows.append(functional(target))
        self.u_tri = np.array(tri_rows, dtype=np.uint8).reshape(len(tri_rows), code.num_checks)

        self.block_lengths = np.array(
            [len(self.block_members[b]) for b in self.block_of_edge], dtype=np.int64
        )
        verts = ((np.arange(2**g, dtype=np.uint32)[:, None] >> np.arange(g)) & 1).astype(np.uint8)
        verts = np.hstack([np.zeros((2**g, 1), dtype=np.uint8), verts])
        self.cuts = np.stack(
            [verts[:, i1 - 1] ^ verts[:, i2 - 1] for (i1, i2) in self.cycle.edges], axis=1
        )


@lru_cache(maxsize=32)
def _concatenated_tools(code: StabilizerCode) -> _ConcatenatedTools:
    return _ConcatenatedTools(code, y_code_structure(code.j, code.k, code))


def concatenated_y_decode(
    structure: YCodeStructure, code: StabilizerCode, s: np.ndarray
) -> DecodeOutcome:
    """Level-by-level decoding of a pure-Y syndrome on a standard code.

    The surface syndrome is converted by precomputed GF(2) combinations into
    boundary-qubit readouts, in-block relative patterns, and triangle parity
    bits of the top-level cycle code.  The bottom level fixes each block up
    to one unknown bit; the top level then selects, among the 2^g candidate
    bit patterns (a particular solution shifted by the cut space of K_{g+1}),
    the one of minimum total qubit weight.  Corrects every error of weight
    at most (d_Y - 1)/2.
    """
    if code.layout != "standard":
        raise ValueError("concatenated decoding applies to standard-layout codes")
    tools = _concatenated_tools(code)
    if tools.structure is not structure and (
        structure.j != code.j or structure.k != code.k
    ):
        raise ValueError("structure does not match code")
    s = np.asarray(s, dtype=np.uint8)
    if not tools.solver.is_consistent(s):
        raise UnattainableSyndromeError(f"{code.id}: syndrome not attainable by a Y-type error")

    s64 = s.astype(np.uint64)
    boundary_bits = ((tools.u_boundary @ s64) & 1).astype(np.uint8)
    rel_bits = ((tools.u_rel @ s64) & 1).astype(np.uint8)
    tri_bits = ((tools.u_tri @ s64) & 1).astype(np.uint8)

    base = solve(tools.cycle.checks, tri_bits)
    if base is None:
        raise AssertionError(f"{code.id}: converted cycle syndrome inconsistent")

    block_w = np.array(
        [int(rel_bits[a:b].sum()) for a, b in tools.rel_slices], dtype=np.int64
    )
    w_edge = block_w[tools.block_of_edge]
    candidates = base[None, :] ^ tools.cuts
    costs = candidates.astype(np.int64) @ (tools.block_lengths - 2 * w_edge) + w_edge.sum()
    best = candidates[int(np.argmin(costs))]

    y = np.zeros(code.n, dtype=np.uint8)
    y[tools.boundary] = boundary_bits
    for edge_idx, block_idx in enumerate(tools.block_of_edge):
        members = tools.block_members[block_idx]
        a, b = tools.rel_slices[block_idx]
        bits = np.concatenate([[0], rel_bits[a:b]]).astype(np.uint8) ^ best[edge_idx]
        y[members] = bits
    h = code.y_check_matrix.to_dense()
    if not np.array_equal(((h @ y.astype(np.uint64)) & 1).astype(np.uint8), s):
        raise AssertionError(f"{code.id}: concatenated recovery syndrome mismatch")
    return DecodeOutcome(PauliOperator.y_type(y), None, None)


class ConcatenatedYDecoder:
    name = "concatenated-y"

    def __init__(self, code: StabilizerCode):
        self.code = code
        self.structure = _concatenated_tools(code).structure
        self.params: dict = {}

    def decode(self, s: np.ndarray) -> DecodeOutcome:
        return concatenated_y_decode(self.structure, self.code, s)


# -- brute-force oracle ----------------------------------------------------


class _BruteTools:
    def __init__(self, code: StabilizerCode):
        if code.n > 16:
            raise ValueError(f"brute-force oracle limited to n <= 16, got n = {code.n}")
        self.code = code
        n = code.n
        x_dense = code.x_dense
        z_dense = code.z_dense
        gens = np.zeros((code.num_checks, 2 * n), dtype=np.uint8)
        gens[: code.num_x_checks, :n] = x_dense
        gens[code.num_x_checks :, n:] = z_dense
        count = code.num_checks
        subset_bits = (
            (np.arange(2**count, dtype=np.int64)[:, None] >> np.arange(count)) & 1
        ).astype(np.uint8)
        self.group = (subset_bits @ gens) & 1


@lru_cache(maxsize=8)
def _brute_tools(code: StabilizerCode) -> _BruteTools:
    return _BruteTools(code)


@lru_cache(maxsize=64)
def _css_solvers(code: StabilizerCode) -> tuple[Gf2Solver, Gf2Solver]:
    return Gf2Solver(code.x_checks), Gf2Solver(code.z_checks)


def candidate_recovery(code: StabilizerCode, s: np.ndarray) -> PauliOperator:
    """Deterministic Pauli with syndrome s: canonical GF(2) half-solves.

    The Z part is solved from the X-check bits and the X part from the
    Z-check bits, free variables zero.  Shared by the MPS decoder and the
    brute-force oracle so their class labels coincide.
    """
    s = np.asarray(s, dtype=np.uint8)
    if s.size != code.num_checks:
        raise ValueError(f"syndrome length {s.size} != {code.num_checks}")
    solver_x, solver_z = _css_solvers(code)
    z_bits = solver_x.solve(s[: code.num_x_checks])
    x_bits = solver_z.solve(s[code.num_x_checks :])
    if z_bits is None or x_bits is None:
        raise UnattainableSyndromeError(f"{code.id}: syndrome outside the check image")
    return PauliOperator(x_bits, z_bits)


def brute_force_ml_decode(
    code: StabilizerCode, model: BiasedNoiseModel, s: np.ndarray
) -> DecodeOutcome:
    """Exact coset probabilities by enumerating all 2^(n-1) stabilizers."""
    tools = _brute_tools(code)
    f = candidate_recovery(code, s)
    n = code.n
    logp = model.log_class_probs
    scores: dict[str, float] = {}
    reps = logical_class_representatives(code)
    for label in _CLASS_ORDER:
        base = f.mul(reps[label]).symplectic()
        ops = tools.group ^ base
        cats = ops[:, :n] + 2 * ops[:, n:]
        with np.errstate(invalid="ignore"):
            per_op = logp[cats].sum(axis=1)
        scores[label] = float(logsumexp(per_op))
    verdict = _argmax_class(scores, _CLASS_ORDER)
    return DecodeOutcome(f.mul(reps[verdict]), verdict, scores)


class BruteForceDecoder:
    name = "brute-force"

    def __init__(self, code: StabilizerCode, model: BiasedNoiseModel):
        _brute_tools(code)  # validate size eagerly
        self.code = code
        self.model = model
        self.params: dict = {}

    def decode(self, s: np.ndarray) -> DecodeOutcome:
        return brute_force_ml_decode(self.code, self.model, s)


# -- rotated-layout MPS decoder -------------------------------------------


def mps_decode_rotated(
    code: StabilizerCode, model: BiasedNoiseModel, s: np.ndarray, chi: int
) -> DecodeOutcome:
    """Approximate ML decoding by boundary-MPS contraction at bond cap chi."""
    if code.layout != "rotated":
        raise ValueError("mps_decode_rotated requires a rotated-layout code")
    if chi < 1:
        raise ValueError(f"chi must be >= 1, got {chi}")
    f = candidate_recovery(code, s)
    reps = logical_class_representatives(code)
    scores: dict[str, float] = {}
    for label in _CLASS_ORDER:
        columns = tensor.build_coset_network(code, model, f.mul(reps[label]))
        scores[label] = tensor.contract_columns(columns, chi)
    verdict = _argmax_class(scores, _CLASS_ORDER)
    return DecodeOutcome(f.mul(reps[verdict]), verdict, scores)


class MpsDecoder:
    name = "mps"

    def __init__(self, code: StabilizerCode, model: BiasedNoiseModel, chi: int):
        if code.layout != "rotated":
            raise ValueError("MpsDecoder requires a rotated-layout code")
        if chi < 1:
            raise ValueError(f"chi must be >= 1, got {chi}")
        tensor.network_layout(code)  # build and cache the wiring eagerly
        self.code = code
        self.model = model
        self.chi = chi
        self.params = {"chi": chi}

    def decode(self, s: np.ndarray) -> DecodeOutcome:
        return mps_decode_rotated(self.code, self.model, s, self.chi)


def decoder_from_name(name: str, code: StabilizerCode, model: BiasedNoiseModel, chi: int = 8):
    """Construct a decoder object from its CLI name."""
    if name == "exact-y":
        return ExactYDecoder(code, model)
    if name == "concatenated-y":
        return ConcatenatedYDecoder(code)
    if name == "brute-force":
        return BruteForceDecoder(code, model)
    if name == "mps":
        return MpsDecoder(code, model, chi)
    raise ValueError(f"unknown decoder {name!r}")
