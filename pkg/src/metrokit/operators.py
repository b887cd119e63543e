"""Qubit Hamiltonians as dense Hermitian matrices and their level structure.

Qubit 1 is the most significant bit of the computational-basis index, so
``|q1 q2 ... qN>`` has index ``int("q1q2...qN", 2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from math import comb

import numpy as np

from .errors import (
    AsymmetricSpectrum,
    InhomogeneousGap,
    NonHermitianInput,
    OddSizeNonLocal,
    SizeTooSmall,
)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

KINDS = ("local", "nearest_neighbor", "cluster_1d", "non_local")
KIND_ALIASES = {
    "local": "local",
    "nn": "nearest_neighbor",
    "nearest_neighbor": "nearest_neighbor",
    "cluster": "cluster_1d",
    "cluster_1d": "cluster_1d",
    "nonlocal": "non_local",
    "non_local": "non_local",
}

MAX_QUBITS = 12


def canonical_kind(kind: str) -> str:
    try:
        return KIND_ALIASES[kind]
    except KeyError:
        raise ValueError(f"unknown Hamiltonian kind {kind!r}; expected one of {sorted(KIND_ALIASES)}") from None


@dataclass(frozen=True)
class PauliString:
    letters: str
    coefficient: complex = 1.0

    def __post_init__(self):
        bad = set(self.letters) - set("IXYZ")
        if bad:
            raise ValueError(f"invalid Pauli letters {sorted(bad)}")

    @property
    def n(self) -> int:
        return len(self.letters)

    def matrix(self) -> np.ndarray:
        return self.coefficient * reduce(np.kron, [PAULI[c] for c in self.letters])


def pauli_sum(terms) -> np.ndarray:
    terms = list(terms)
    n = terms[0].n
    out = np.zeros((2**n, 2**n), dtype=complex)
    for t in terms:
        if t.n != n:
            raise ValueError("Pauli strings act on different qubit counts")
        out += t.matrix()
    return out


def _letters(n: int, placed: dict[int, str]) -> str:
    return "".join(placed.get(i, "I") for i in range(n))


def collective(n: int, axis: str) -> np.ndarray:
    """Sum of one Pauli over all qubits, without the factor 1/2."""
    axis = axis.upper()
    return pauli_sum(PauliString(_letters(n, {i: axis})) for i in range(n))


def flip_all(n: int) -> np.ndarray:
    """sigma_x on every qubit (reverses the computational index)."""
    return np.eye(2**n, dtype=complex)[::-1]


@dataclass(frozen=True)
class HermitianOperator:
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise NonHermitianInput(f"expected a square matrix, got shape {m.shape}")
        dim = m.shape[0]
        if dim < 1 or dim & (dim - 1):
            raise ValueError(f"dimension {dim} is not a power of two")
        # Frobenius norm bounds the spectral radius from above
        scale = np.linalg.norm(m)
        if np.abs(m - m.conj().T).max(initial=0.0) > 1e-12 * max(scale, 1.0):
            raise NonHermitianInput("matrix is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.dim.bit_length() - 1

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix.copy() if copy else self.matrix
        return self.matrix.astype(dtype)

    def to_json(self) -> dict:
        from .serialize import matrix_to_json

        return matrix_to_json(self.matrix)

    @classmethod
    def from_json(cls, payload: dict) -> "HermitianOperator":
        from .serialize import matrix_from_json

        return cls(matrix_from_json(payload))


def phase_gate(n: int, i: int, j: int) -> np.ndarray:
    """Controlled-Z between 0-based qubits ``i`` and ``j`` (diagonal)."""
    idx = np.arange(2**n)
    bi = (idx >> (n - 1 - i)) & 1
    bj = (idx >> (n - 1 - j)) & 1
    return np.diag(np.where(bi & bj, -1.0, 1.0)).astype(complex)


def cluster_conjugator(n: int) -> np.ndarray:
    """Product of phase gates along the open path 1-2-...-n."""
    v = np.eye(2**n, dtype=complex)
    for i in range(n - 1):
        v = phase_gate(n, i, i + 1) @ v
    return v


def build_hamiltonian(kind: str, n: int) -> HermitianOperator:
    kind = canonical_kind(kind)
    if n < 2:
        raise SizeTooSmall(f"need at least 2 qubits, got {n}")
    if n > MAX_QUBITS:
        raise ValueError(f"dense storage is capped at {MAX_QUBITS} qubits")
    if kind == "local":
        m = 0.5 * collective(n, "Z")
    elif kind == "nearest_neighbor":
        m = pauli_sum(PauliString(_letters(n, {i: "Z", i + 1: "Z"})) for i in range(n - 1))
    elif kind == "cluster_1d":
        v = cluster_conjugator(n)
        m = v @ collective(n, "X") @ v.conj().T
    else:
        if n % 2:
            raise OddSizeNonLocal(f"non-local Hamiltonian needs even n, got {n}")
        terms = [PauliString(_letters(n, {i: "Y", i + 1: "Y"})) for i in range(n - 1)]
        terms += [PauliString("X" * n), PauliString("Z" * n)]
        m = pauli_sum(terms)
    return HermitianOperator(m)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Levels in descending order; ``basis`` columns grouped level by level."""

    eigenvalues: np.ndarray
    multiplicities: tuple[int, ...]
    basis: np.ndarray = field(repr=False)
    gap: float | None = None

    @property
    def levels(self) -> list[tuple[float, int]]:
        return [(float(l), int(d)) for l, d in zip(self.eigenvalues, self.multiplicities)]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.multiplicities)])

    def level_slice(self, k: int) -> slice:
        """Columns of level ``k`` (0-based)."""
        off = self.offsets
        return slice(int(off[k]), int(off[k + 1]))

    def level_basis(self, k: int) -> np.ndarray:
        return self.basis[:, self.level_slice(k)]

    def operator(self) -> np.ndarray:
        lam = np.repeat(self.eigenvalues, self.multiplicities)
        return (self.basis * lam) @ self.basis.conj().T

    def with_gap(self, gap: float) -> "SpectralDecomposition":
        return SpectralDecomposition(self.eigenvalues, self.multiplicities, self.basis, gap)


def canonical_subspace_basis(q: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Deterministic orthonormal basis of the column span of ``q``.

    Computational basis states are projected onto the subspace in index
    order and Gram-Schmidt orthogonalized, skipping dependent ones. Columns
    are then ordered by their first component above 1e-9 in magnitude, and
    that component is made real positive.
    """
    dim, d = q.shape
    if d == 0:
        return q
    chosen: list[np.ndarray] = []
    for idx in range(dim):
        v = q @ q[idx].conj()  # projector applied to e_idx
        for u in chosen:
            v = v - u * np.vdot(u, v)
        norm = np.linalg.norm(v)
        if norm > tol:
            v = v / norm
            # second pass keeps orthogonality at machine precision
            for u in chosen:
                v = v - u * np.vdot(u, v)
            chosen.append(v / np.linalg.norm(v))
            if len(chosen) == d:
                break
    out = np.array(chosen).T
    firsts = [int(np.flatnonzero(np.abs(col) > 1e-9)[0]) for col in out.T]
    order = np.argsort(firsts, kind="stable")
    out = out[:, order]
    for j, f in enumerate(np.asarray(firsts)[order]):
        ph = out[f, j] / abs(out[f, j])
        out[:, j] = out[:, j] / ph
    return out


def spectral_decompose(h, degeneracy_tol: float = 1e-9) -> SpectralDecomposition:
    """Group eigenvalues into degenerate levels, descending.

    Eigenvalues closer than ``degeneracy_tol`` times the spectral radius
    (absolute when the operator is zero) are merged into one level.
    """
    m = np.asarray(h, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonHermitianInput(f"expected a square matrix, got shape {m.shape}")
    scale = np.linalg.norm(m)
    if np.abs(m - m.conj().T).max(initial=0.0) > 1e-10 * max(scale, 1.0):
        raise NonHermitianInput("matrix is not Hermitian")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    w, v = w[::-1], v[:, ::-1]
    radius = float(np.max(np.abs(w))) if w.size else 0.0
    tol = degeneracy_tol * (radius if radius > 0 else 1.0)

    groups: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        if w[groups[-1][-1]] - w[i] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    eigenvalues = np.array([w[g].mean() for g in groups])
    blocks = [canonical_subspace_basis(v[:, g]) for g in groups]
    return SpectralDecomposition(eigenvalues, tuple(len(g) for g in groups), np.hstack(blocks))


def check_homogeneous_gap(spec: SpectralDecomposition, tol: float = 1e-9) -> float:
    """Common spacing of consecutive levels; also checks the centered spectrum is symmetric."""
    lam = np.asarray(spec.eigenvalues, dtype=float)
    if lam.size < 2:
        raise InhomogeneousGap("need at least two levels to define a gap")
    gaps = lam[:-1] - lam[1:]
    c = float(gaps.mean())
    scale = max(1.0, float(np.abs(lam).max()))
    dev = np.abs(gaps - c)
    worst = int(np.argmax(dev))
    if dev[worst] > tol * scale:
        raise InhomogeneousGap(
            f"levels {worst + 1},{worst + 2} are {gaps[worst]:.6g} apart, mean gap {c:.6g}"
        )
    centered = lam - 0.5 * (lam[0] + lam[-1])
    if np.abs(centered + centered[::-1]).max() > tol * scale:
        raise AsymmetricSpectrum("centered eigenvalues are not symmetric about zero")
    return c


def nn_spectrum_formula(n: int) -> list[tuple[int, int]]:
    if n < 2:
        raise SizeTooSmall(f"need at least 2 qubits, got {n}")
    return [(n - 1 - 2 * x, 2 * comb(n - 1, x)) for x in range(n)]
