"""Local z-dephasing: Kraus sets, the elementwise fast path, and unitary evolution."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import (
    DimensionMismatch,
    IncompleteKrausSet,
    NonPositiveTime,
    SizeTooLargeForExplicitKraus,
)
from .states import QuantumState, _matrix

MAX_KRAUS_QUBITS = 10


@dataclass(frozen=True)
class DephasingChannel:
    n: int
    p: float
    gamma: float | None = None
    t: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    @classmethod
    def from_rate(cls, n: int, gamma: float, t: float) -> "DephasingChannel":
        if t < 0:
            raise NonPositiveTime(f"exposure time must be >= 0, got {t}")
        if gamma < 0:
            raise ValueError(f"dephasing rate must be >= 0, got {gamma}")
        # off-diagonals decay as exp(-gamma t), so 2p - 1 = exp(-gamma t)
        return cls(n, 0.5 * (1.0 + np.exp(-gamma * t)), gamma, t)

    @property
    def contrast(self) -> float:
        """Per-qubit coherence factor 2p - 1."""
        return 2.0 * self.p - 1.0

    @property
    def q2(self) -> float:
        return 4.0 * self.p * (1.0 - self.p)


@lru_cache(maxsize=16)
def hamming_table(n: int) -> np.ndarray:
    """h(x xor y) for all pairs of basis indices."""
    idx = np.arange(2**n)
    x = idx[:, None] ^ idx[None, :]
    out = np.zeros_like(x)
    for b in range(n):
        out += (x >> b) & 1
    out.setflags(write=False)
    return out


@lru_cache(maxsize=16)
def hamming_weights(n: int) -> np.ndarray:
    w = hamming_table(n)[0].copy()
    w.setflags(write=False)
    return w


def damping_matrix(n: int, contrast: float) -> np.ndarray:
    # 0**0 = 1 keeps the diagonal intact at full dephasing
    return np.power(float(contrast), hamming_table(n))


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators, stored as diagonals when ``diagonal`` is set."""

    operators: tuple = field(repr=False)
    labels: tuple = ()
    diagonal: bool = False

    def __len__(self):
        return len(self.operators)

    def matrices(self):
        for k in self.operators:
            yield np.diag(k) if self.diagonal else k

    def completeness_residual(self) -> float:
        if self.diagonal:
            s = sum(np.abs(k) ** 2 for k in self.operators)
            return float(np.abs(s - 1).max())
        s = sum(k.conj().T @ k for k in self.operators)
        return float(np.abs(s - np.eye(s.shape[0])).max())


def dephasing_kraus(channel: DephasingChannel) -> KrausSet:
    """Tensor products S_m = S_{m1} x ... x S_{mn}, S_0 = sqrt(p) I, S_1 = sqrt(1-p) Z."""
    n = channel.n
    if n > MAX_KRAUS_QUBITS:
        raise SizeTooLargeForExplicitKraus(f"explicit Kraus sets are limited to {MAX_KRAUS_QUBITS} qubits")
    p = channel.p
    dim = 2**n
    idx = np.arange(dim)
    ops, labels = [], []
    for m in range(dim):
        h = bin(m).count("1")
        # sign of Z^{m} on basis state x is (-1)^{popcount(m & x)}
        par = np.zeros(dim, dtype=int)
        for b in range(n):
            if (m >> b) & 1:
                par ^= (idx >> b) & 1
        amp = np.sqrt(p) ** (n - h) * np.sqrt(1 - p) ** h
        ops.append(amp * (1.0 - 2.0 * par).astype(complex))
        labels.append(format(m, f"0{n}b"))
    return KrausSet(tuple(ops), tuple(labels), diagonal=True)


def _rho(state) -> np.ndarray:
    if isinstance(state, QuantumState):
        return state.density()
    return np.asarray(state, dtype=complex)


def apply_dephasing(state, channel: DephasingChannel) -> QuantumState:
    rho = _rho(state)
    if rho.shape[0] != 2**channel.n:
        raise DimensionMismatch(f"state dim {rho.shape[0]} vs channel on {channel.n} qubits")
    return QuantumState.mixed(rho * damping_matrix(channel.n, channel.contrast))


def apply_channel_kraus(state, ks: KrausSet, tol: float = 1e-10) -> QuantumState:
    if ks.completeness_residual() > tol:
        raise IncompleteKrausSet("sum of K^dag K differs from identity")
    rho = _rho(state)
    out = np.zeros_like(rho)
    if ks.diagonal:
        for k in ks.operators:
            out += k[:, None] * rho * k.conj()[None, :]
    else:
        for k in ks.operators:
            out += k @ rho @ k.conj().T
    return QuantumState.mixed(0.5 * (out + out.conj().T))


def unitary(h, theta: float) -> np.ndarray:
    m = _matrix(h)
    if np.count_nonzero(m - np.diag(np.diag(m))) == 0:
        return np.diag(np.exp(1j * theta * np.diag(m)))
    return expm(1j * theta * m)


def evolve_unitary(state: QuantumState, h, theta: float) -> QuantumState:
    u = unitary(h, theta)
    if u.shape[0] != state.dim:
        raise DimensionMismatch(f"operator dim {u.shape[0]} vs state dim {state.dim}")
    if state.is_pure:
        return QuantumState.pure(u @ state.vector)
    rho = u @ state.data @ u.conj().T
    return QuantumState.mixed(0.5 * (rho + rho.conj().T))


def commutes_with_signal(h, channel: DephasingChannel, tol: float = 1e-10) -> bool:
    """Whether dephasing commutes with conjugation by exp(i theta H) for every theta.

    Needs (2p-1)^{h(z xor y)} = (2p-1)^{h(x xor y)} for every y whenever H_xz != 0.
    """
    m = _matrix(h)
    off = np.abs(m - np.diag(np.diag(m))) > tol * max(1.0, float(np.abs(m).max()))
    if not off.any():
        return True
    r = channel.contrast
    if abs(abs(r) - 1.0) < 1e-15:
        if r > 0:
            return True
        hm = hamming_table(channel.n)
        return bool((hm[off] % 2 == 0).all())
    return False
