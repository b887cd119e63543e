"""Purification-based upper bounds on the QFI under local dephasing."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .channels import DephasingChannel, dephasing_kraus
from .errors import (
    DimensionMismatch,
    IncompleteKrausSet,
    InvalidQ,
    SizeTooLargeForExplicitKraus,
    UnsupportedRemixGenerator,
)
from .operators import collective
from .states import QuantumState, _matrix, expectation, variance

MAX_EXPLICIT_BOUND_QUBITS = 6
VARIANTS = ("local_general", "local_pg", "local_ghz", "nn")


@dataclass(frozen=True)
class BoundReport:
    cq: float
    xi: float
    omega: float
    alpha_min: float | None = None
    variant: str = ""
    q2: float | None = None

    def as_dict(self) -> dict:
        return {
            "cq": self.cq, "xi": self.xi, "omega": self.omega,
            "alpha_min": self.alpha_min, "q2": self.q2, "variant": self.variant,
        }


def cq_from_kraus(state: QuantumState, kraus, dkraus, tol: float = 1e-10) -> BoundReport:
    """4(<A1> - <A2>^2) with A1 = sum dK^dag dK and A2 = i sum dK^dag K."""
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    dkraus = [np.asarray(k, dtype=complex) for k in dkraus]
    if len(kraus) != len(dkraus):
        raise DimensionMismatch("Kraus operators and derivatives differ in number")
    s = sum(k.conj().T @ k for k in kraus)
    if np.abs(s - np.eye(s.shape[0])).max() > tol:
        raise IncompleteKrausSet("sum of K^dag K differs from identity")
    v = state.vector
    # <A1> = sum |dK psi|^2, <A2> = i sum <dK psi | K psi>
    a1 = sum(np.vdot(d @ v, d @ v).real for d in dkraus)
    a2 = (1j * sum(np.vdot(d @ v, k @ v) for k, d in zip(kraus, dkraus))).real
    return BoundReport(max(4.0 * (a1 - a2**2), 0.0), float("nan"), float("nan"), variant="kraus")


def label_sx(n: int) -> np.ndarray:
    """Collective sigma_x acting on the 2^n Kraus labels."""
    return collective(n, "X").real


def remixed_kraus(h, channel: DephasingChannel, alpha: float, b=None):
    """Kraus operators and theta-derivatives at theta = 0 for V(theta) = exp(i alpha theta B).

    K_n = S_n, dK_n = i alpha sum_m B_nm S_m + i H S_n.
    """
    n = channel.n
    if n > MAX_EXPLICIT_BOUND_QUBITS:
        raise SizeTooLargeForExplicitKraus(f"explicit bound path is limited to {MAX_EXPLICIT_BOUND_QUBITS} qubits")
    m = _matrix(h)
    ks = [np.diag(k) for k in dephasing_kraus(channel).operators]
    b = label_sx(n) if b is None else np.asarray(b)
    dks = []
    for row in range(len(ks)):
        mix = sum(b[row, col] * ks[col] for col in np.flatnonzero(b[row]))
        dks.append(1j * alpha * mix + 1j * m @ ks[row])
    return ks, dks


def xi_omega(state: QuantumState, h, channel: DephasingChannel, b: str = "collective_sx") -> tuple[float, float]:
    if b not in ("collective_sx", "sx"):
        raise UnsupportedRemixGenerator(f"only the collective S_x remix is supported, got {b!r}")
    m = _matrix(h)
    if m.shape[0] != state.dim:
        raise DimensionMismatch(f"operator dim {m.shape[0]} vs state dim {state.dim}")
    n = channel.n
    q2 = channel.q2
    q = np.sqrt(q2)
    sz = _sz_diag(n)
    if state.is_pure:
        v = state.vector
        hv = m @ v
        h_sz = np.vdot(hv, sz * v).real
        mean_h = np.vdot(v, hv).real
        p_sz = np.abs(v) ** 2
    else:
        rho = state.data
        h_sz = np.trace(rho @ m * sz[None, :]).real
        mean_h = np.trace(rho @ m).real
        p_sz = np.diag(rho).real
    mean_sz = float(p_sz @ sz)
    var_sz = max(float(p_sz @ sz**2) - mean_sz**2, 0.0)
    xi = q * (h_sz - mean_h * mean_sz)
    omega = n * (1.0 - q2) + q2 * var_sz
    return float(xi), float(omega)


def _sz_diag(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    ones = sum((idx >> b) & 1 for b in range(n))
    return (n - 2 * ones).astype(float)


def cq_alpha(state: QuantumState, h, channel: DephasingChannel, alpha: float) -> float:
    xi, omega = xi_omega(state, h, channel)
    return 4.0 * (variance(state, h) + 2 * alpha * xi + alpha**2 * omega)


def cq_min_dephasing(state: QuantumState, h, channel: DephasingChannel) -> BoundReport:
    xi, omega = xi_omega(state, h, channel)
    dh2 = variance(state, h)
    if omega > 0:
        alpha = -xi / omega
        cq = 4.0 * (dh2 - xi**2 / omega)
    else:
        alpha, cq = 0.0, 4.0 * dh2
    return BoundReport(max(cq, 0.0), xi, omega, alpha, "min_dephasing", channel.q2)


def _check_q2(q2: float):
    if not 0.0 <= q2 <= 1.0 or np.isnan(q2):
        raise InvalidQ(f"q^2 must lie in [0, 1], got {q2}")


def _ratio(num: float, den: float) -> float:
    return 0.0 if num == 0 else num / den


def cq_closed_form(variant: str, n: int, q2: float, dh2: float | None = None,
                   cov: float | None = None, dsz2: float | None = None) -> float:
    """Closed-form minimal bounds.

    local_general: 4 N dH2 (1-q2) / (N(1-q2) + q2 dH2), for H = sum_i sigma_z.
    local_pg / local_ghz: the same with dH2 = N/4 (N/2+1) and N^2/4.
    nn: 4(dH2 - q2 cov^2 / (N(1-q2) + q2 dSz2)), cov = <H Sz> - <H><Sz>.
    """
    variant = variant.replace("-", "_")
    _check_q2(q2)
    if variant == "local_pg":
        dh2 = n / 4 * (n / 2 + 1)
    elif variant == "local_ghz":
        dh2 = n**2 / 4
    elif variant not in VARIANTS:
        raise ValueError(f"unknown bound variant {variant!r}; expected one of {VARIANTS}")
    if dh2 is None:
        raise ValueError(f"variant {variant} needs the Hamiltonian variance")
    if variant == "nn":
        if cov is None or dsz2 is None:
            raise ValueError("nn variant needs the covariance and the S_z variance")
        return 4.0 * (dh2 - _ratio(q2 * cov**2, n * (1 - q2) + q2 * dsz2))
    return _ratio(4.0 * n * dh2 * (1 - q2), n * (1 - q2) + q2 * dh2)


def reference_frequency_bounds(n: float, total_time: float, gamma: float) -> dict:
    """Frequency variances for GHZ probes and for optimal spin-squeezed probes."""
    if min(n, total_time, gamma) <= 0:
        raise ValueError("N, T and gamma must be positive")
    sss = 2.0 * gamma / (n * total_time)
    return {"ghz_bound": float(np.e * sss), "sss_bound": float(sss)}


def brute_force_xi_omega(state: QuantumState, h, channel: DephasingChannel) -> tuple[float, float]:
    """Explicit double sums over Kraus labels, for checking ``xi_omega``."""
    n = channel.n
    ks = [np.diag(k) for k in dephasing_kraus(channel).operators]
    b = label_sx(n)
    b2 = b @ b
    x = reduce(np.add, (b[l, k] * ks[l].conj().T @ ks[k] for l in range(len(ks)) for k in np.flatnonzero(b[l])))
    y = reduce(np.add, (b2[l, k] * ks[l].conj().T @ ks[k] for l in range(len(ks)) for k in np.flatnonzero(b2[l])))
    m = _matrix(h)
    hx = 0.5 * (m @ x + x @ m)
    mean_x = expectation(state, x).real
    xi = expectation(state, hx).real - expectation(state, m).real * mean_x
    omega = expectation(state, y).real - mean_x**2
    return float(xi), float(omega)
