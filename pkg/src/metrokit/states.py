"""Probe states: ground states, raised (pretty good) states, reference families, variances."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from math import comb, ceil
from itertools import combinations

import numpy as np

from .errors import (
    AnnihilatedState,
    DimensionMismatch,
    KOutOfRange,
    SizeTooSmall,
    UnknownBasis,
)
from .operators import HermitianOperator, canonical_kind, spectral_decompose
from .su2 import Su2Generators, ladder_pair

NORM_TOL = 1e-12


@dataclass(frozen=True)
class QuantumState:
    kind: str  # "pure" or "mixed"
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.data, dtype=complex)
        if self.kind == "pure":
            a = a.ravel()
            if abs(np.vdot(a, a).real - 1.0) > 1e-10:
                raise ValueError("state vector is not normalized")
        elif self.kind == "mixed":
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise ValueError("density matrix must be square")
            if np.abs(a - a.conj().T).max() > 1e-10 or abs(np.trace(a).real - 1) > 1e-10:
                raise ValueError("density matrix must be Hermitian with unit trace")
        else:
            raise ValueError(f"unknown state kind {self.kind!r}")
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @classmethod
    def pure(cls, v, normalize: bool = True) -> "QuantumState":
        v = np.asarray(v, dtype=complex).ravel()
        if normalize:
            nrm = np.linalg.norm(v)
            if nrm < NORM_TOL:
                raise ValueError("zero vector")
            v = v / nrm
        return cls("pure", v)

    @classmethod
    def mixed(cls, rho) -> "QuantumState":
        return cls("mixed", rho)

    @property
    def is_pure(self) -> bool:
        return self.kind == "pure"

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.dim.bit_length() - 1

    @property
    def vector(self) -> np.ndarray:
        if not self.is_pure:
            raise ValueError("mixed state has no state vector")
        return self.data

    def density(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def overlap(self, other: "QuantumState") -> float:
        """|<a|b>| for pure states."""
        return float(abs(np.vdot(self.vector, other.vector)))

    def to_json(self) -> dict:
        from .serialize import matrix_to_json, vector_to_json

        return vector_to_json(self.data) if self.is_pure else matrix_to_json(self.data)


def _matrix(op) -> np.ndarray:
    return op.matrix if isinstance(op, HermitianOperator) else np.asarray(op, dtype=complex)


def basis_state(n: int, bits: str | int) -> np.ndarray:
    v = np.zeros(2**n, dtype=complex)
    v[int(bits, 2) if isinstance(bits, str) else bits] = 1.0
    return v


def ground_state(op, selector="first") -> QuantumState:
    """Lowest eigenvector of ``op``.

    In a degenerate ground space ``selector="first"`` takes the first
    canonical basis vector; an array of coefficients picks a superposition.
    """
    spec = spectral_decompose(_matrix(op))
    g = spec.level_basis(len(spec.multiplicities) - 1)
    if isinstance(selector, str):
        if selector != "first":
            raise ValueError(f"unknown selector {selector!r}")
        return QuantumState.pure(g[:, 0])
    coeffs = np.asarray(selector, dtype=complex)
    if coeffs.size != g.shape[1]:
        raise DimensionMismatch(f"ground space has dimension {g.shape[1]}, got {coeffs.size} coefficients")
    return QuantumState.pure(g @ coeffs)


def antiferro_bits(n: int, start: int = 0) -> str:
    return "".join(str((start + i) % 2) for i in range(n))


def nn_ground_superposition(n: int, alpha: float) -> QuantumState:
    """cos(a/2)|0101...> + sin(a/2)|1010...>."""
    if n < 2:
        raise SizeTooSmall(f"need at least 2 qubits, got {n}")
    v = np.cos(alpha / 2) * basis_state(n, antiferro_bits(n, 0))
    v = v + np.sin(alpha / 2) * basis_state(n, antiferro_bits(n, 1))
    return QuantumState.pure(v)


def default_k(j_max: float) -> int:
    """Integer in 0..2j closest to j, ties toward the smaller one."""
    return int(round(2 * j_max)) // 2


def theorem_k(j_max: float) -> int:
    """ceil((2j+1)/2), the literal choice from the existence theorem."""
    return int(ceil(round(2 * j_max) / 2 + 0.5))


def raise_state(gens: Su2Generators, psi: np.ndarray, axis: int, k: int) -> np.ndarray:
    up = ladder_pair(gens, axis).raise_op
    v = np.asarray(psi, dtype=complex)
    for _ in range(k):
        v = up @ v
    return v


def pretty_good_state(
    gens: Su2Generators, ladder_axis: int = 3, k: int | None = None, ground: QuantumState | None = None
) -> QuantumState:
    if k is None:
        k = default_k(gens.j_max)
    if k < 0:
        raise KOutOfRange(f"k must be non-negative, got {k}")
    if ground is None:
        ground = ground_state(gens.generator(ladder_axis))
    v = raise_state(gens, ground.vector, ladder_axis, k)
    nrm = np.linalg.norm(v)
    if nrm < 1e-12:
        raise AnnihilatedState(f"raising {k} times annihilates the state")
    return QuantumState.pure(v / nrm)


def _dicke_z(n: int, k: int) -> np.ndarray:
    v = np.zeros(2**n, dtype=complex)
    for ones in combinations(range(n), k):
        v[sum(1 << (n - 1 - i) for i in ones)] = 1.0
    return v / np.sqrt(comb(n, k))


_BASIS_CHANGE = {
    "z": np.eye(2, dtype=complex),
    "x": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "y": np.array([[1, 1], [1j, -1j]], dtype=complex) / np.sqrt(2),
}


def dicke_state(n: int, k: int, basis: str = "z") -> QuantumState:
    """Symmetric state with k qubits in |1> of the chosen single-qubit basis."""
    if basis not in _BASIS_CHANGE:
        raise UnknownBasis(f"unknown basis {basis!r}; expected x, y or z")
    if not 0 <= k <= n:
        raise KOutOfRange(f"need 0 <= k <= {n}, got {k}")
    u = reduce(np.kron, [_BASIS_CHANGE[basis]] * n)
    return QuantumState.pure(u @ _dicke_z(n, k))


def ghz_state(n: int) -> QuantumState:
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 1.0
    return QuantumState.pure(v)


def product_plus(n: int) -> QuantumState:
    return QuantumState.pure(np.ones(2**n, dtype=complex))


def nn_balanced_extremal(n: int, phi: float = 0.0) -> QuantumState:
    """(psi_max + e^{i phi} psi_min)/sqrt 2 with both extremal Ising eigenstates flip symmetric."""
    top = basis_state(n, 0) + basis_state(n, 2**n - 1)
    bottom = basis_state(n, antiferro_bits(n, 0)) + basis_state(n, antiferro_bits(n, 1))
    return QuantumState.pure(top + np.exp(1j * phi) * bottom)


def optimal_state(h, phi: float = 0.0, kind: str | None = None) -> QuantumState:
    """Equal superposition of extremal eigenvectors.

    For the Ising chain the pair |0...0> and |1010...> is used.
    """
    m = _matrix(h)
    n = m.shape[0].bit_length() - 1
    if kind is not None and canonical_kind(kind) == "nearest_neighbor":
        top = basis_state(n, 0)
        bottom = basis_state(n, antiferro_bits(n, 1))
    else:
        spec = spectral_decompose(m)
        top = spec.level_basis(0)[:, 0]
        bottom = spec.level_basis(len(spec.multiplicities) - 1)[:, 0]
    return QuantumState.pure(bottom + np.exp(1j * phi) * top)


def reference_state(kind: str, h=None, n: int | None = None, **kw) -> QuantumState:
    """Named reference probes: optimal, ghz, product_plus, dicke."""
    if n is None:
        n = _matrix(h).shape[0].bit_length() - 1
    if kind == "optimal":
        return optimal_state(h, kw.get("phi", 0.0), kw.get("hamiltonian_kind"))
    if kind == "ghz":
        return ghz_state(n)
    if kind in ("product", "product_plus"):
        return product_plus(n)
    if kind == "dicke":
        return dicke_state(n, kw.get("k", n // 2), kw.get("basis", "x"))
    raise ValueError(f"unknown reference state {kind!r}")


def expectation(state: QuantumState, op) -> complex:
    m = _matrix(op)
    if m.shape[0] != state.dim:
        raise DimensionMismatch(f"operator dim {m.shape[0]} vs state dim {state.dim}")
    if state.is_pure:
        v = state.vector
        return complex(np.vdot(v, m @ v))
    return complex(np.trace(state.data @ m))


def variance(state: QuantumState, h) -> float:
    m = _matrix(h)
    if m.shape[0] != state.dim:
        raise DimensionMismatch(f"operator dim {m.shape[0]} vs state dim {state.dim}")
    if state.is_pure:
        w = m @ state.vector
        mean = np.vdot(state.vector, w).real
        var = np.vdot(w, w).real - mean**2
    else:
        rho = state.data
        mean = np.trace(rho @ m).real
        var = np.trace(rho @ m @ m).real - mean**2
    return max(float(var), 0.0)


def pg_variance_closed_form(j_max: float, k: int, c: float) -> float:
    if k < 0 or k > 2 * j_max + 1e-9:
        raise KOutOfRange(f"need 0 <= k <= 2j = {2 * j_max:g}, got {k}")
    return 0.5 * c**2 * (j_max * (j_max + 1) - (k - j_max) ** 2)


def same_up_to_phase(a, b, tol: float = 1e-9) -> bool:
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    return abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b)) > 1 - tol
