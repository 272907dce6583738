"""First and second quadrature moments of truncated Fock-space states.

Moments of truncated states are taken as exact inputs to Gaussian fitting;
no extrapolation to infinite dimension is attempted.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigMismatchError, TruncationWarning
from .fock_space import DensityMatrix, QuadratureOps, is_well_truncated

IMAG_TOL = 1e-10


def symplectic_form(num_modes: int) -> np.ndarray:
    """Omega = direct sum of [[0, 1], [-1, 0]] in (q_1, p_1, ...) ordering."""
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(num_modes), j)


@dataclass(frozen=True)
class Moments:
    """Displacement vector d (length 2N) and covariance matrix V (2N x 2N)."""

    displacement: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.displacement, dtype=float).reshape(-1)
        v = np.asarray(self.covariance, dtype=float)
        if v.shape != (d.size, d.size) or d.size % 2 != 0:
            raise ValueError(f"inconsistent moment shapes {d.shape} / {v.shape}")
        object.__setattr__(self, "displacement", d)
        object.__setattr__(self, "covariance", 0.5 * (v + v.T))

    @property
    def num_modes(self) -> int:
        return self.displacement.size // 2


def _check_configs(rho: DensityMatrix, ops: QuadratureOps):
    if not rho.config.same_layout(ops.config):
        raise ConfigMismatchError(
            f"state cutoffs {rho.config.cutoffs} != operator cutoffs {ops.config.cutoffs}"
        )


def displacement(rho: DensityMatrix, ops: QuadratureOps) -> np.ndarray:
    """d_l = Tr[rho R_l]; warns if the imaginary residue exceeds 1e-10."""
    _check_configs(rho, ops)
    vals = np.array([np.trace(rho.data @ r) for r in ops.R])
    residue = float(np.abs(vals.imag).max())
    if residue > IMAG_TOL:
        warnings.warn(
            f"displacement imaginary residue {residue:.3e} exceeds {IMAG_TOL:.0e}",
            TruncationWarning,
        )
    return vals.real


def covariance(rho: DensityMatrix, ops: QuadratureOps) -> np.ndarray:
    """V_lm = Tr[rho (R_l R_m + R_m R_l)/2] - d_l d_m, symmetrized."""
    _check_configs(rho, ops)
    if not is_well_truncated(rho):
        warnings.warn(
            "state is not well-truncated; second moments may be inaccurate",
            TruncationWarning,
        )
    d = displacement(rho, ops)
    n2 = len(ops.R)
    # Tr[rho R_l R_m] = sum((rho @ R_l).T * R_m) elementwise; O(dim^2) per pair.
    prods = [rho.data @ r for r in ops.R]
    v = np.empty((n2, n2))
    for l in range(n2):
        xl = prods[l].T
        for m in range(l, n2):
            tr_lm = np.sum(xl * ops.R[m])          # Tr[rho R_l R_m]
            tr_ml = np.sum(prods[m].T * ops.R[l])  # Tr[rho R_m R_l]
            v[l, m] = v[m, l] = 0.5 * (tr_lm + tr_ml).real - d[l] * d[m]
    return v


def extract(rho: DensityMatrix, ops: QuadratureOps) -> Moments:
    """Both moments in one call."""
    return Moments(displacement=displacement(rho, ops), covariance=covariance(rho, ops))


def check_uncertainty(m: Moments, tol: float = 1e-10) -> tuple[bool, float]:
    """Test V + (i/2)Omega >= 0; returns (ok, smallest eigenvalue)."""
    v = m.covariance
    if not np.allclose(v, v.T, atol=1e-12):
        raise ValueError("covariance matrix must be symmetric")
    omega = symplectic_form(m.num_modes)
    margin = float(np.linalg.eigvalsh(v + 0.5j * omega).min())
    return margin >= -tol, margin
