"""Truncated N-mode Fock space: operators, tensor products, partial traces,
state constructors and density-matrix validation.

Conventions (fixed globally): hbar = 1, [q, p] = i, a = (q + i p) / sqrt(2),
mode ordering (q_1, p_1, ..., q_N, p_N), mode 1 is the leftmost Kronecker
factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionLimitError, StateValidationError

DEFAULT_CUTOFF = 30
DEFAULT_MAX_DIM = 4096

# Population of the top two Fock levels per mode below which a state counts
# as well-truncated.
WELL_TRUNCATED_TOL = 1e-8


@dataclass(frozen=True)
class ModeConfig:
    """Per-mode Fock cutoffs of a truncated N-mode space.

    ``cutoffs[j] = d_j`` keeps basis states |0> ... |d_j - 1> for mode j.
    """

    cutoffs: tuple[int, ...]
    max_dim: int = DEFAULT_MAX_DIM

    def __post_init__(self):
        object.__setattr__(self, "cutoffs", tuple(int(d) for d in self.cutoffs))
        if len(self.cutoffs) < 1:
            raise ValueError("need at least one mode")
        if any(d < 2 for d in self.cutoffs):
            raise ValueError(f"every cutoff must be >= 2, got {self.cutoffs}")
        if self.total_dim > self.max_dim:
            raise DimensionLimitError(
                f"total dimension {self.total_dim} exceeds limit {self.max_dim}"
            )

    @property
    def num_modes(self) -> int:
        return len(self.cutoffs)

    @property
    def total_dim(self) -> int:
        return math.prod(self.cutoffs)

    def same_layout(self, other: "ModeConfig") -> bool:
        return self.cutoffs == other.cutoffs


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DensityMatrix:
    """Trace-one Hermitian matrix on a truncated N-mode Fock space.

    ``leakage`` records the trace mass beyond the cutoff that was absorbed by
    renormalization when the state was constructed (0 for exact states).
    """

    config: ModeConfig
    data: np.ndarray
    leakage: float = 0.0

    def __post_init__(self):
        d = self.config.total_dim
        arr = np.ascontiguousarray(self.data, dtype=complex)
        if arr.shape != (d, d):
            raise ValueError(f"expected {d}x{d} matrix, got {arr.shape}")
        object.__setattr__(self, "data", _readonly(arr))

    @property
    def dim(self) -> int:
        return self.config.total_dim


@dataclass(frozen=True)
class QuadratureOps:
    """Quadratures (q_1, p_1, ..., q_N, p_N) and number operators n_1..n_N."""

    config: ModeConfig
    R: tuple[np.ndarray, ...]
    number_ops: tuple[np.ndarray, ...]


def annihilation(cutoff: int) -> np.ndarray:
    """Single-mode annihilation operator, <n-1|a|n> = sqrt(n)."""
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1)


def embed_operator(config: ModeConfig, op: np.ndarray, mode: int) -> np.ndarray:
    """Kronecker-embed a single-mode operator at position ``mode`` (0-based)."""
    if not 0 <= mode < config.num_modes:
        raise ValueError(f"mode {mode} out of range for {config.num_modes} modes")
    factors = [np.eye(d) for d in config.cutoffs]
    factors[mode] = op
    return reduce(np.kron, factors)


@lru_cache(maxsize=16)
def build_operators(config: ModeConfig) -> QuadratureOps:
    """Construct all quadrature and number operators for ``config``.

    q = (a + a†)/sqrt(2) and p = -i (a - a†)/sqrt(2);  [q_j, p_j] = i holds
    exactly below the top Fock level of each mode (truncation artifact there).
    """
    R: list[np.ndarray] = []
    number_ops: list[np.ndarray] = []
    for mode, d in enumerate(config.cutoffs):
        a = annihilation(d)
        q = (a + a.T) / np.sqrt(2.0)
        p = -1j * (a - a.T) / np.sqrt(2.0)
        R.append(_readonly(embed_operator(config, q, mode).astype(complex)))
        R.append(_readonly(embed_operator(config, p, mode).astype(complex)))
        number_ops.append(
            _readonly(embed_operator(config, np.diag(np.arange(d, dtype=float)), mode))
        )
    return QuadratureOps(config=config, R=tuple(R), number_ops=tuple(number_ops))


def tensor(states: Sequence[DensityMatrix]) -> DensityMatrix:
    """Kronecker product of states in mode order.

    A single-element sequence is returned unchanged.  The trace of the result
    is the product of the factor traces.
    """
    if len(states) == 0:
        raise ValueError("tensor of zero states")
    if len(states) == 1:
        return states[0]
    cutoffs: tuple[int, ...] = ()
    for s in states:
        cutoffs = cutoffs + s.config.cutoffs
    max_dim = max(s.config.max_dim for s in states)
    config = ModeConfig(cutoffs, max_dim=max_dim)  # raises DimensionLimitError
    data = reduce(np.kron, [s.data for s in states])
    leakage = 1.0 - math.prod(1.0 - s.leakage for s in states)
    return DensityMatrix(config=config, data=data, leakage=leakage)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduce to the modes in ``keep`` (0-based, returned in ascending order)."""
    keep_set = sorted(set(int(k) for k in keep))
    n = rho.config.num_modes
    if not keep_set:
        raise ValueError("keep set must be nonempty")
    if keep_set[0] < 0 or keep_set[-1] >= n:
        raise ValueError(f"keep modes {keep_set} out of range for {n} modes")
    if len(keep_set) == n:
        return rho

    dims = rho.config.cutoffs
    t = rho.data.reshape(dims + dims)
    # Traced-out modes share one einsum letter between ket and bra axes.
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    ket = list(letters[:n])
    bra, out_ket, out_bra = [], [], []
    nxt = n
    for m in range(n):
        if m in keep_set:
            bra.append(letters[nxt])
            out_ket.append(ket[m])
            out_bra.append(letters[nxt])
            nxt += 1
        else:
            bra.append(ket[m])
    sub = "".join(ket) + "".join(bra) + "->" + "".join(out_ket) + "".join(out_bra)
    reduced = np.einsum(sub, t)
    new_config = ModeConfig(
        tuple(dims[m] for m in keep_set), max_dim=rho.config.max_dim
    )
    d = new_config.total_dim
    return DensityMatrix(config=new_config, data=reduced.reshape(d, d))


def mode_populations(rho: DensityMatrix) -> list[np.ndarray]:
    """Per-mode photon-number populations (marginals of the diagonal)."""
    diag = np.real(np.diagonal(rho.data)).reshape(rho.config.cutoffs)
    pops = []
    for m in range(rho.config.num_modes):
        axes = tuple(k for k in range(rho.config.num_modes) if k != m)
        pops.append(diag.sum(axis=axes) if axes else diag.copy())
    return pops


def is_well_truncated(rho: DensityMatrix, tol: float = WELL_TRUNCATED_TOL) -> bool:
    """True when each mode's top-two-level population stays below ``tol``."""
    return all(float(p[-2:].sum()) < tol for p in mode_populations(rho))


@dataclass(frozen=True)
class Diagnostics:
    """Validation residuals of a candidate density matrix."""

    hermiticity: float
    trace_deviation: float
    min_eigenvalue: float
    tail_mass: tuple[float, ...]      # per-mode top-level population
    tail_top2: tuple[float, ...]      # per-mode top-two-level population
    passed: bool
    well_truncated: bool
    tolerances: dict = field(default_factory=dict)


def validate(
    rho: DensityMatrix,
    herm_tol: float = 1e-9,
    trace_tol: float = 1e-9,
    psd_tol: float = 1e-8,
    tail_threshold: float = 1e-6,
) -> Diagnostics:
    """Report hermiticity/trace/positivity residuals and per-mode tail mass.

    Never raises; ``passed`` flags the comparison against the tolerances.
    """
    m = rho.data
    herm = float(np.abs(m - m.conj().T).max())
    trace_dev = float(abs(np.trace(m).real - 1.0) + abs(np.trace(m).imag))
    sym = 0.5 * (m + m.conj().T)
    min_eig = float(np.linalg.eigvalsh(sym).min())
    pops = mode_populations(rho)
    tail = tuple(float(p[-1]) for p in pops)
    tail2 = tuple(float(p[-2:].sum()) for p in pops)
    passed = (
        herm <= herm_tol
        and trace_dev <= trace_tol
        and min_eig >= -psd_tol
        and all(t <= tail_threshold for t in tail)
    )
    return Diagnostics(
        hermiticity=herm,
        trace_deviation=trace_dev,
        min_eigenvalue=min_eig,
        tail_mass=tail,
        tail_top2=tail2,
        passed=passed,
        well_truncated=all(t < WELL_TRUNCATED_TOL for t in tail2),
        tolerances={
            "herm_tol": herm_tol,
            "trace_tol": trace_tol,
            "psd_tol": psd_tol,
            "tail_threshold": tail_threshold,
        },
    )


def require_valid(rho: DensityMatrix, **tols) -> Diagnostics:
    """validate() that raises StateValidationError on failure."""
    diag = validate(rho, **tols)
    if not diag.passed:
        raise StateValidationError(
            "invalid density matrix: "
            f"hermiticity={diag.hermiticity:.3e}, "
            f"trace_dev={diag.trace_deviation:.3e}, "
            f"min_eig={diag.min_eigenvalue:.3e}, "
            f"tail={max(diag.tail_mass):.3e}"
        )
    return diag


# ---------------------------------------------------------------------------
# Elementary state constructors
# ---------------------------------------------------------------------------

def basis_index(config: ModeConfig, occupation: Sequence[int]) -> int:
    """Flat index of |n_1, ..., n_N> (mode 1 is the slowest index)."""
    occ = tuple(int(n) for n in occupation)
    if len(occ) != config.num_modes:
        raise ValueError("occupation length mismatch")
    if any(n < 0 or n >= d for n, d in zip(occ, config.cutoffs)):
        raise ValueError(f"occupation {occ} outside cutoffs {config.cutoffs}")
    return int(np.ravel_multi_index(occ, config.cutoffs))


def fock_projector(config: ModeConfig, occupation: Sequence[int]) -> DensityMatrix:
    """|{n}><{n}| for the given occupation multi-index."""
    d = config.total_dim
    data = np.zeros((d, d), dtype=complex)
    i = basis_index(config, occupation)
    data[i, i] = 1.0
    return DensityMatrix(config=config, data=data)


def vacuum(config: ModeConfig) -> DensityMatrix:
    return fock_projector(config, (0,) * config.num_modes)


def pure_state(config: ModeConfig, amplitudes: np.ndarray) -> DensityMatrix:
    """Projector onto a (renormalized) state vector."""
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.shape != (config.total_dim,):
        raise ValueError("amplitude vector has wrong length")
    norm2 = float(np.vdot(v, v).real)
    if norm2 <= 0.0:
        raise ValueError("zero state vector")
    return DensityMatrix(
        config=config, data=np.outer(v, v.conj()) / norm2, leakage=max(0.0, 1.0 - norm2)
    )


def coherent_state(alpha: complex, cutoff: int = DEFAULT_CUTOFF) -> DensityMatrix:
    """Single-mode coherent-state projector |alpha><alpha| (renormalized)."""
    n = np.arange(cutoff)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, cutoff)))))
    amps = np.exp(-0.5 * abs(alpha) ** 2) * np.power(complex(alpha), n) / np.exp(
        0.5 * log_fact
    )
    return pure_state(ModeConfig((cutoff,)), amps)


def superposition_01(cutoff: int = DEFAULT_CUTOFF) -> DensityMatrix:
    """Projector onto (|0> + |1>)/sqrt(2)."""
    v = np.zeros(cutoff, dtype=complex)
    v[0] = v[1] = 1.0 / np.sqrt(2.0)
    return pure_state(ModeConfig((cutoff,)), v)
