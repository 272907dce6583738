"""Shared random-state generators for the test suite.

States are built on a low Fock sub-block so they are exactly representable
at the working cutoff: every moment and entropy is then free of truncation
bias and closed-form oracles apply without caveats.
"""

import numpy as np
from scipy.linalg import expm

from nongauss import DensityMatrix, FockDiagonal, ModeConfig, symplectic_form


def low_block_indices(config: ModeConfig, levels) -> np.ndarray:
    """Flat basis indices whose occupation stays below ``levels`` per mode."""
    ranges = [np.arange(min(l, d)) for l, d in zip(levels, config.cutoffs)]
    mesh = np.meshgrid(*ranges, indexing="ij")
    return np.ravel_multi_index([m.reshape(-1) for m in mesh], config.cutoffs)


def random_state(
    config: ModeConfig, rng, levels=None, damping: float = 0.0
) -> DensityMatrix:
    """Random mixed state supported on the lowest Fock levels."""
    if levels is None:
        levels = config.cutoffs
    idx = low_block_indices(config, levels)
    k = idx.size
    g = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    block = g @ g.conj().T
    if damping > 0.0:
        occ = np.array(np.unravel_index(idx, config.cutoffs)).sum(axis=0)
        w = np.exp(-damping * occ)
        block = block * np.outer(w, w)
    block /= np.trace(block).real
    data = np.zeros((config.total_dim, config.total_dim), dtype=complex)
    data[np.ix_(idx, idx)] = block
    return DensityMatrix(config=config, data=data)


def random_fds(config: ModeConfig, rng, levels=None) -> FockDiagonal:
    """Random photon-number distribution on the lowest Fock levels."""
    idx = low_block_indices(config, levels or config.cutoffs)
    lam = np.zeros(config.total_dim)
    lam[idx] = rng.dirichlet(np.ones(idx.size))
    return FockDiagonal(config=config, probabilities=lam.reshape(config.cutoffs))


def random_symplectic(num_modes: int, rng, scale: float = 0.3) -> np.ndarray:
    """exp(Omega K) for symmetric K is symplectic."""
    k = rng.standard_normal((2 * num_modes, 2 * num_modes))
    k = 0.5 * (k + k.T)
    return expm(symplectic_form(num_modes) @ k * scale)


def random_covariance(num_modes: int, rng, nu_range=(0.55, 1.5), scale=0.3):
    """Random bona fide covariance matrix with its Williamson data."""
    nus = np.sort(rng.uniform(*nu_range, size=num_modes))[::-1]
    s = random_symplectic(num_modes, rng, scale=scale)
    v = s @ np.diag(np.repeat(nus, 2)) @ s.T
    return v, nus
