"""Fock-diagonal states: marginals, nearest product state, total mutual
information, closed-form non-Gaussianity and the photon-number dephasing map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StateValidationError
from .fock_space import DensityMatrix, ModeConfig
from .gaussian_states import GaussianParams
from .moments import Moments
from .entropy_measures import relative_entropy, shannon, von_neumann


@dataclass(frozen=True)
class FockDiagonal:
    """Photon-number probability array over occupation multi-indices.

    ``probabilities`` has shape ``config.cutoffs``; entry (n_1, ..., n_N) is
    the weight of the Fock projector |n_1 ... n_N>.
    """

    config: ModeConfig
    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.shape != self.config.cutoffs:
            raise ValueError(
                f"probability array shape {p.shape} != cutoffs {self.config.cutoffs}"
            )
        if p.min() < -1e-12:
            raise StateValidationError(f"negative probability {p.min():.3e}")
        total = float(p.sum())
        if abs(total - 1.0) > 1e-9:
            raise StateValidationError(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "probabilities", np.clip(p, 0.0, None))

    @property
    def num_modes(self) -> int:
        return self.config.num_modes


def single_mode_fds(probabilities, cutoff: int | None = None) -> FockDiagonal:
    """Convenience constructor; pads to ``cutoff`` when given."""
    p = np.asarray(probabilities, dtype=float).reshape(-1)
    if cutoff is not None:
        if cutoff < p.size:
            raise ValueError("cutoff smaller than distribution support")
        p = np.concatenate([p, np.zeros(cutoff - p.size)])
    return FockDiagonal(config=ModeConfig((p.size,)), probabilities=p)


@dataclass(frozen=True)
class MarginalSet:
    """Per-mode photon-number distributions and their means."""

    distributions: tuple[np.ndarray, ...]
    means: np.ndarray


def marginals(fds: FockDiagonal) -> MarginalSet:
    """One-mode reductions (lambda_j)_m = sum over the other indices."""
    dists = []
    means = []
    for j in range(fds.num_modes):
        axes = tuple(k for k in range(fds.num_modes) if k != j)
        pj = fds.probabilities.sum(axis=axes) if axes else fds.probabilities.copy()
        dists.append(pj)
        means.append(float((np.arange(pj.size) * pj).sum()))
    return MarginalSet(distributions=tuple(dists), means=np.array(means))


def product_state(fds: FockDiagonal) -> FockDiagonal:
    """Nearest product state: factorized photon-number probabilities."""
    ms = marginals(fds)
    p = ms.distributions[0]
    for pj in ms.distributions[1:]:
        p = np.multiply.outer(p, pj)
    return FockDiagonal(config=fds.config, probabilities=p)


def total_mutual_information(fds: FockDiagonal) -> float:
    """S(product of marginals) - S(fds) = sum_j H(lambda_j) - H(lambda)."""
    ms = marginals(fds)
    return float(sum(shannon(pj) for pj in ms.distributions)) - shannon(
        fds.probabilities.reshape(-1)
    )


def fds_covariance(fds: FockDiagonal) -> Moments:
    """Zero displacement and V = direct sum of (<n>_j + 1/2) I_2."""
    ms = marginals(fds)
    v = np.diag(np.repeat(ms.means + 0.5, 2))
    return Moments(displacement=np.zeros(2 * fds.num_modes), covariance=v)


def closest_gaussian_fds(fds: FockDiagonal) -> GaussianParams:
    """Thermal parameters with the same mean occupancies, S = I, d = 0."""
    ms = marginals(fds)
    n = fds.num_modes
    return GaussianParams(
        occupancies=ms.means,
        symplectic=np.eye(2 * n),
        displacement=np.zeros(2 * n),
    )


def _thermal_term(means: np.ndarray) -> float:
    m = np.asarray(means, dtype=float)
    pos = m > 0.0
    out = (m + 1.0) * np.log(m + 1.0)
    out[pos] -= m[pos] * np.log(m[pos])
    return float(out.sum())


def nongauss_fds(fds: FockDiagonal) -> float:
    """Closed-form delta_S of a Fock-diagonal state.

    sum_j [(<n>_j+1) ln(<n>_j+1) - <n>_j ln <n>_j] minus the Shannon entropy
    of the photon-number distribution.
    """
    ms = marginals(fds)
    return _thermal_term(ms.means) - shannon(fds.probabilities.reshape(-1))


def nongauss_product(fds: FockDiagonal) -> float:
    """Closed-form delta_S of the nearest product state: N single-mode terms."""
    ms = marginals(fds)
    return _thermal_term(ms.means) - float(sum(shannon(pj) for pj in ms.distributions))


def to_density_matrix(fds: FockDiagonal) -> DensityMatrix:
    """Dense diagonal realization in the truncated Fock basis."""
    return DensityMatrix(
        config=fds.config, data=np.diag(fds.probabilities.reshape(-1).astype(complex))
    )


def dephase(rho: DensityMatrix) -> FockDiagonal:
    """Nonselective photon-number measurement: keep the Fock diagonal."""
    lam = np.clip(np.real(np.diagonal(rho.data)), 0.0, None)
    lam = lam / lam.sum()
    return FockDiagonal(
        config=rho.config, probabilities=lam.reshape(rho.config.cutoffs)
    )


def dephasing_entropy_gain(rho: DensityMatrix, check_tol: float = 1e-5) -> float:
    """S(dephased) - S(rho), which equals S(rho | dephased).

    The entropy-difference value is cross-checked against the dense relative
    entropy; disagreement beyond ``check_tol`` raises.
    """
    fds = dephase(rho)
    gain = shannon(fds.probabilities.reshape(-1)) - von_neumann(rho)
    dense = relative_entropy(rho, to_density_matrix(fds))
    if abs(dense - gain) > check_tol:
        raise StateValidationError(
            f"dephasing identity violated: entropy gain {gain:.6g} vs "
            f"relative entropy {dense:.6g}"
        )
    return gain
