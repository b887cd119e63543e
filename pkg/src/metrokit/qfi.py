"""Quantum Fisher information for a phase imprinted by exp(i theta H)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import DephasingChannel, apply_dephasing, commutes_with_signal, unitary
from .errors import DimensionMismatch, MixedInput, NonCommutingNoise, NonHermitianDerivative
from .states import QuantumState, _matrix, variance

CUTOFF = 1e-12


@dataclass(frozen=True)
class QfiResult:
    value: float
    method: str

    def __float__(self):
        return self.value


def _clamp(x: float) -> float:
    return max(float(x), 0.0)


def qfi_pure(state: QuantumState, h) -> QfiResult:
    if not state.is_pure:
        raise MixedInput("qfi_pure needs a pure state")
    return QfiResult(4.0 * variance(state, h), "pure_variance")


def _check_derivative(rho, drho, tol=1e-9):
    scale = max(1.0, float(np.abs(drho).max(initial=0.0)))
    if np.abs(drho - drho.conj().T).max(initial=0.0) > tol * scale:
        raise NonHermitianDerivative("derivative of the state is not Hermitian")
    if abs(np.trace(drho)) > tol * scale:
        raise NonHermitianDerivative("derivative of the state is not traceless")
    if rho.shape != drho.shape:
        raise DimensionMismatch("state and derivative shapes differ")


def _sld_parts(rho, drho, cutoff):
    lam, v = np.linalg.eigh(rho)
    d = v.conj().T @ drho @ v
    s = lam[:, None] + lam[None, :]
    keep = s > cutoff * np.trace(rho).real
    return lam, v, d, s, keep


def sld(rho, drho, cutoff: float = CUTOFF) -> np.ndarray:
    rho, drho = _matrix(rho), _matrix(drho)
    _check_derivative(rho, drho)
    lam, v, d, s, keep = _sld_parts(rho, drho, cutoff)
    l_eig = np.where(keep, 2.0 * d / np.where(keep, s, 1.0), 0.0)
    out = v @ l_eig @ v.conj().T
    return 0.5 * (out + out.conj().T)


def qfi_from_derivative(rho, drho, cutoff: float = CUTOFF) -> float:
    """Tr[L rho L] = 2 sum |<a|drho|b>|^2 / (la + lb)."""
    lam, v, d, s, keep = _sld_parts(_matrix(rho), _matrix(drho), cutoff)
    return _clamp(2.0 * np.sum(np.abs(d[keep]) ** 2 / s[keep]))


def qfi_mixed_sld(state: QuantumState, h, channel: DephasingChannel | None = None, theta: float = 0.0) -> QfiResult:
    m = _matrix(h)
    if m.shape[0] != state.dim:
        raise DimensionMismatch(f"operator dim {m.shape[0]} vs state dim {state.dim}")
    rho = state.density() if channel is None else apply_dephasing(state, channel).data
    if theta:
        u = unitary(m, theta)
        rho = u @ rho @ u.conj().T
    drho = 1j * (m @ rho - rho @ m)
    _check_derivative(rho, drho)
    return QfiResult(qfi_from_derivative(rho, drho), "sld_general")


def spectral_qfi(rho, h, cutoff: float = CUTOFF) -> float:
    """4 sum_{i<j} (li - lj)^2 / (li + lj) |<i|H|j>|^2 over eigenpairs of rho."""
    lam, v = np.linalg.eigh(rho)
    hij = v.conj().T @ h @ v
    s = lam[:, None] + lam[None, :]
    keep = s > cutoff * lam.sum()
    diff2 = (lam[:, None] - lam[None, :]) ** 2
    terms = np.where(keep, diff2 / np.where(keep, s, 1.0), 0.0) * np.abs(hij) ** 2
    # full double sum counts every unordered pair twice
    return _clamp(2.0 * terms.sum())


def qfi_dephased_spectral(state: QuantumState, h, channel: DephasingChannel) -> QfiResult:
    m = _matrix(h)
    if m.shape[0] != state.dim:
        raise DimensionMismatch(f"operator dim {m.shape[0]} vs state dim {state.dim}")
    if not commutes_with_signal(m, channel):
        raise NonCommutingNoise("dephasing does not commute with the signal unitary")
    rho = apply_dephasing(state, channel).data
    return QfiResult(spectral_qfi(rho, m), "dephased_spectral")
