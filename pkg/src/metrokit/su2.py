"""Complete a homogeneously gapped Hamiltonian into an su(2) generator triple."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .errors import (
    ConditionViolation,
    MixedStructureConstants,
    NegativePartialSum,
    SizeTooSmall,
    Su2ViolationDetected,
)
from .operators import (
    HermitianOperator,
    PauliString,
    SpectralDecomposition,
    build_hamiltonian,
    check_homogeneous_gap,
    collective,
    pauli_sum,
    spectral_decompose,
)

CLAMP_TOL = 1e-9


@dataclass(frozen=True)
class MultiplicityReport:
    ok: bool
    index: int | None = None
    message: str = ""

    def __bool__(self):
        return self.ok


def check_multiplicity_conditions(spec: SpectralDecomposition) -> MultiplicityReport:
    """d_{k+1} >= d_k on the lower half of the levels, and mirror symmetry d_k = d_{n+1-k}."""
    d = list(spec.multiplicities)
    n = len(d)
    for k in range(1, n // 2 + 1):
        if k < n and d[k] < d[k - 1]:
            return MultiplicityReport(False, k, f"d_{k + 1}={d[k]} < d_{k}={d[k - 1]}")
    for k in range(n // 2):
        if d[k] != d[n - 1 - k]:
            return MultiplicityReport(
                False, k + 1, f"d_{k + 1}={d[k]} differs from its mirror d_{n - k}={d[n - 1 - k]}"
            )
    return MultiplicityReport(True)


@dataclass(frozen=True)
class Su2Generators:
    s1: HermitianOperator
    s2: HermitianOperator
    s3: HermitianOperator
    c: float
    basis: np.ndarray = field(repr=False)
    j_max: float
    spectrum: SpectralDecomposition | None = field(default=None, repr=False)
    blocks: tuple = field(default=(), repr=False)

    @property
    def dim(self) -> int:
        return self.s1.dim

    def generator(self, axis: int) -> np.ndarray:
        return (self.s1, self.s2, self.s3)[axis - 1].matrix

    def casimir(self) -> np.ndarray:
        a, b, d = self.s1.matrix, self.s2.matrix, self.s3.matrix
        return a @ a + b @ b + d @ d

    def block(self, k: int) -> np.ndarray:
        """S3 block between levels k and k+1 (1-based), shape d_{k+1} x d_k."""
        return self.blocks[k - 1]


def theorem_blocks(eigenvalues, multiplicities, c: float) -> list[np.ndarray]:
    """Level-basis S3 blocks: diagonal sqrt(c/2 * sum_{i=j..k} lambda_i), j=1..k."""
    lam = np.asarray(eigenvalues, dtype=float)
    d = list(multiplicities)
    scale = max(1.0, float(np.abs(lam).max()))
    out = []
    for k in range(1, len(d)):
        diag = []
        for j in range(1, k + 1):
            reps = d[0] if j == 1 else max(d[j - 1] - d[j - 2], 0)
            s = float(lam[j - 1 : k].sum())
            diag.extend([s] * reps)
        m = min(d[k - 1], d[k])
        diag = (diag + [0.0] * m)[:m]
        vals = np.array(diag)
        if (vals < -CLAMP_TOL * scale).any():
            bad = float(vals.min())
            raise NegativePartialSum(f"partial sum {bad:.6g} < 0 in block ({k},{k + 1})")
        vals = np.clip(vals, 0.0, None)
        blk = np.zeros((d[k], d[k - 1]))
        blk[np.arange(m), np.arange(m)] = np.sqrt(0.5 * c * vals)
        out.append(blk)
    return out


def _assemble(blocks, multiplicities) -> np.ndarray:
    off = np.concatenate([[0], np.cumsum(multiplicities)])
    dim = int(off[-1])
    s = np.zeros((dim, dim), dtype=complex)
    for k, blk in enumerate(blocks):
        s[off[k + 1] : off[k + 2], off[k] : off[k + 1]] = blk
    return s


def j_from_casimir(mu: float, c: float) -> float:
    disc = max(1.0 + 4.0 * mu / c**2, 0.0)
    return 0.5 * (-1.0 + np.sqrt(disc))


def _hermitize(m):
    return HermitianOperator(0.5 * (m + m.conj().T))


def construct_generators(spec: SpectralDecomposition, tol: float = 1e-9) -> Su2Generators:
    c = spec.gap if spec.gap is not None else check_homogeneous_gap(spec, tol)
    rep = check_multiplicity_conditions(spec)
    if not rep:
        raise ConditionViolation(f"multiplicity condition fails at k={rep.index}: {rep.message}")
    shift = 0.5 * (spec.eigenvalues[0] + spec.eigenvalues[-1])
    lam = spec.eigenvalues - shift
    blocks = theorem_blocks(lam, spec.multiplicities, c)
    lower = _assemble(blocks, spec.multiplicities)
    s3_lvl = lower + lower.conj().T
    s2_lvl = -1j * lower + (-1j * lower).conj().T
    b = spec.basis
    s1 = spec.operator() - shift * np.eye(spec.dim)
    s2 = b @ s2_lvl @ b.conj().T
    s3 = b @ s3_lvl @ b.conj().T
    gens = Su2Generators(
        _hermitize(s1), _hermitize(s2), _hermitize(s3), float(c), b, 0.0, spec, tuple(blocks)
    )
    mu = float(np.linalg.eigvalsh(gens.casimir())[-1])
    return _replace_j(gens, j_from_casimir(mu, c))


def _replace_j(g: Su2Generators, j: float) -> Su2Generators:
    return Su2Generators(g.s1, g.s2, g.s3, g.c, g.basis, j, g.spectrum, g.blocks)


def generators_for(kind: str, n: int) -> Su2Generators:
    return construct_generators(spectral_decompose(build_hamiltonian(kind, n)))


def construct_generators_blockdiag(blocks) -> Su2Generators:
    blocks = list(blocks)
    if not blocks:
        raise ValueError("need at least one block")
    parts = [construct_generators(b) for b in blocks]
    cs = [p.c for p in parts]
    if max(cs) - min(cs) > 1e-9 * max(1.0, max(cs)):
        raise MixedStructureConstants(f"blocks disagree on the gap: {cs}")
    if len(parts) == 1:
        return parts[0]
    s = [block_diag(*[p.generator(a) for p in parts]) for a in (1, 2, 3)]
    basis = block_diag(*[p.basis for p in parts])
    c = cs[0]
    g = Su2Generators(*(HermitianOperator(m) for m in s), c, basis, 0.0)
    mu = float(np.linalg.eigvalsh(g.casimir())[-1])
    return _replace_j(g, j_from_casimir(mu, c))


@dataclass(frozen=True)
class LadderPair:
    raise_op: np.ndarray = field(repr=False)
    lower_op: np.ndarray = field(repr=False)
    axis: int
    c: float


def ladder_pair(gens: Su2Generators, axis: int) -> LadderPair:
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {axis}")
    l, m = axis % 3 + 1, (axis + 1) % 3 + 1
    up = (gens.generator(l) + 1j * gens.generator(m)) / np.sqrt(2)
    return LadderPair(up, up.conj().T, axis, gens.c)


@dataclass(frozen=True)
class Su2Report:
    commutator_residual: float
    casimir_residual: float
    j_max: float | None
    degenerate: bool

    def ok(self, tol: float) -> bool:
        return self.commutator_residual < tol and self.casimir_residual < tol


def _comm(a, b):
    return a @ b - b @ a


def verify_su2(gens: Su2Generators, tol: float = 1e-9) -> Su2Report:
    s = [gens.generator(a) for a in (1, 2, 3)]
    c = gens.c
    res = 0.0
    for k, l, m in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        res = max(res, float(np.abs(_comm(s[k], s[l]) - 1j * c * s[m]).max()))
    j2 = sum(x @ x for x in s)
    cas = max(float(np.abs(_comm(j2, x)).max()) for x in s)
    degenerate = all(np.abs(x).max() < tol for x in s) or c <= 0
    j = None
    if not degenerate:
        j = float(j_from_casimir(float(np.linalg.eigvalsh(j2)[-1]), c))
    return Su2Report(res, cas, j, degenerate)


def nn_alternative_generators(n: int, tol: float = 1e-9) -> Su2Generators:
    """Second generator set for the Ising chain built from x-strings.

    S2 = sum_j X..X Y Z I..I (Y at site j) and S3 = -sum_j X^{(x)j} I..I. The
    overall sign of S3 puts |+>^n at the bottom of its spectrum.
    """
    if n < 2:
        raise SizeTooSmall(f"need at least 2 qubits, got {n}")
    s1 = build_hamiltonian("nearest_neighbor", n).matrix
    s2 = pauli_sum(PauliString("X" * j + "YZ" + "I" * (n - j - 2)) for j in range(n - 1))
    s3 = -pauli_sum(PauliString("X" * j + "I" * (n - j)) for j in range(1, n))
    # structure constant from [S2, S3] = i c S1 read off the largest entry
    comm = _comm(s2, s3)
    idx = np.unravel_index(np.argmax(np.abs(s1)), s1.shape)
    c = float((comm[idx] / (1j * s1[idx])).real)
    g = Su2Generators(
        HermitianOperator(s1), HermitianOperator(s2), HermitianOperator(s3), c, np.eye(2**n), 0.0
    )
    rep = verify_su2(g, tol)
    scale = tol * 2**n
    if not rep.ok(scale):
        raise Su2ViolationDetected(
            f"residuals {rep.commutator_residual:.3g}, {rep.casimir_residual:.3g} exceed {scale:.3g}"
        )
    return _replace_j(g, rep.j_max)


def collective_spin_generators(n: int) -> Su2Generators:
    """S1 = Z/2, S2 = X/2, S3 = Y/2 summed over qubits, c = 1."""
    ops = [0.5 * collective(n, a) for a in "ZXY"]
    g = Su2Generators(*(HermitianOperator(m) for m in ops), 1.0, np.eye(2**n), n / 2)
    return g
