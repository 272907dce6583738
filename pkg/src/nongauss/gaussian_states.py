"""Gaussian states: Williamson decomposition, truncated-Fock synthesis from
the exponential form, the associate Gaussian of a state, and the entropy of a
symplectic spectrum.

A Gaussian state is parametrized by mean occupancies nbar_j (symplectic
eigenvalues nu_j = nbar_j + 1/2), a symplectic matrix S and a displacement
vector.  Its logarithm is the quadratic form

    ln rho_G = -1/2 (R - d)^T G (R - d) + c * I,
    G = S eta S^T,   eta = diag(eta_1, eta_1, ..., eta_N, eta_N),
    eta_j = ln((nbar_j + 1)/nbar_j),
    c = -sum_j ln(nbar_j + 1) + tr(eta)/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, schur

from .errors import TruncationError, UncertaintyViolationError
from .fock_space import (
    DEFAULT_CUTOFF,
    DensityMatrix,
    ModeConfig,
    QuadratureOps,
    annihilation,
    build_operators,
    mode_populations,
    vacuum,
)
from .moments import Moments, extract, symplectic_form

# Gaussian references with a pure direction (nu = 1/2) have unbounded log;
# the synthesis/log-form domain excludes occupancies below this floor.
NBAR_FLOOR = 1e-6

SYMPLECTIC_TOL = 1e-10
NU_TOL = 1e-9


@dataclass(frozen=True)
class GaussianParams:
    """(occupancies, symplectic, displacement) parametrization of a Gaussian.

    Occupancies may be zero (thermal fits of vacuum modes); operations that
    need the exponential form enforce the NBAR_FLOOR separately.
    """

    occupancies: np.ndarray
    symplectic: np.ndarray
    displacement: np.ndarray

    def __post_init__(self):
        occ = np.asarray(self.occupancies, dtype=float).reshape(-1)
        s = np.asarray(self.symplectic, dtype=float)
        d = np.asarray(self.displacement, dtype=float).reshape(-1)
        n = occ.size
        if s.shape != (2 * n, 2 * n) or d.size != 2 * n:
            raise ValueError("inconsistent Gaussian parameter shapes")
        if occ.min() < -1e-12:
            raise ValueError(f"negative occupancy {occ.min()}")
        omega = symplectic_form(n)
        resid = float(np.abs(s @ omega @ s.T - omega).max())
        if resid > SYMPLECTIC_TOL:
            raise ValueError(f"symplectic residual {resid:.3e} exceeds {SYMPLECTIC_TOL:.0e}")
        object.__setattr__(self, "occupancies", np.clip(occ, 0.0, None))
        object.__setattr__(self, "symplectic", s)
        object.__setattr__(self, "displacement", d)

    @property
    def num_modes(self) -> int:
        return self.occupancies.size

    @property
    def nu(self) -> np.ndarray:
        """Symplectic eigenvalues nbar + 1/2."""
        return self.occupancies + 0.5

    def target_covariance(self) -> np.ndarray:
        """V = S (direct sum nu_j I_2) S^T."""
        return self.symplectic @ np.diag(np.repeat(self.nu, 2)) @ self.symplectic.T


@dataclass(frozen=True)
class GaussianLogForm:
    """Quadratic log of a full-rank Gaussian: ln rho_G = -1/2 dR^T G dR + c I."""

    G: np.ndarray
    c: float
    displacement: np.ndarray


def williamson(V: np.ndarray, nu_tol: float = NU_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Williamson decomposition V = S (direct sum nu_j I_2) S^T.

    Diagonalizes the antisymmetric matrix V^{-1/2} Omega V^{-1/2} by a real
    Schur decomposition; nu are returned sorted descending.  Raises on
    non-positive-definite input and on symplectic eigenvalues below
    1/2 - nu_tol (uncertainty violation).
    """
    V = np.asarray(V, dtype=float)
    n2 = V.shape[0]
    if V.shape != (n2, n2) or n2 % 2 != 0:
        raise ValueError("covariance matrix must be square with even dimension")
    if np.abs(V - V.T).max() > 1e-10:
        raise ValueError("covariance matrix must be symmetric")
    n = n2 // 2

    w, Q = np.linalg.eigh(V)
    if w.min() <= 0.0:
        raise ValueError(f"covariance matrix not positive definite (min eig {w.min():.3e})")
    v_sqrt = (Q * np.sqrt(w)) @ Q.T
    v_isqrt = (Q / np.sqrt(w)) @ Q.T

    omega = symplectic_form(n)
    A = v_isqrt @ omega @ v_isqrt
    A = 0.5 * (A - A.T)
    T, Z = schur(A, output="real")

    # Each diagonal 2x2 block of T is [[0, b], [-b, 0]]; make b positive by
    # swapping the corresponding Schur vector pair.
    b = np.empty(n)
    for j in range(n):
        k = 2 * j
        bj = 0.5 * (T[k, k + 1] - T[k + 1, k])
        if bj < 0.0:
            Z[:, [k, k + 1]] = Z[:, [k + 1, k]]
            bj = -bj
        b[j] = bj
    nu = 1.0 / b

    # nu descending; degenerate pairs ordered by their leading Schur vector.
    order = sorted(
        range(n),
        key=lambda j: (-round(nu[j], 10), tuple(np.round(Z[:, 2 * j], 10))),
    )
    nu = nu[list(order)]
    cols = []
    for j in order:
        cols.extend([2 * j, 2 * j + 1])
    O = Z[:, cols]

    if nu.min() < 0.5 - nu_tol:
        raise UncertaintyViolationError(
            f"symplectic eigenvalue {nu.min():.6g} below 1/2 (uncertainty violation)"
        )
    S = v_sqrt @ O @ np.diag(np.repeat(1.0 / np.sqrt(nu), 2))
    return S, nu


def thermal_state(nbar: float, cutoff: int = DEFAULT_CUTOFF) -> DensityMatrix:
    """Single-mode thermal state, geometric spectrum renormalized over the cutoff."""
    if nbar < 0:
        raise ValueError(f"mean occupancy must be nonnegative, got {nbar}")
    config = ModeConfig((cutoff,))
    if nbar == 0.0:
        return vacuum(config)
    n = np.arange(cutoff)
    p = (1.0 / (nbar + 1.0)) * (nbar / (nbar + 1.0)) ** n
    total = float(p.sum())
    return DensityMatrix(config=config, data=np.diag(p / total), leakage=1.0 - total)


def eta_values(occupancies: np.ndarray) -> np.ndarray:
    """eta_j = ln((nbar_j + 1)/nbar_j)."""
    occ = np.asarray(occupancies, dtype=float)
    return np.log((occ + 1.0) / occ)


def log_form(params: GaussianParams) -> GaussianLogForm:
    """Quadratic-polynomial form of ln rho_G.

    For a state with covariance S (sum nu_j I_2) S^T the exponent matrix is
    G = S^{-T} eta S^{-1}: the canonical variables Y = S^T R diagonalize the
    quadratic form to the thermal one.  Requires all occupancies at or above
    NBAR_FLOOR: pure Gaussian references are outside the domain (their log is
    unbounded).
    """
    occ = params.occupancies
    if occ.min() < NBAR_FLOOR:
        raise ValueError(
            f"occupancy {occ.min():.3g} below floor {NBAR_FLOOR}: pure Gaussian "
            "references have no bounded logarithm"
        )
    eta = eta_values(occ)
    eta_mat = np.diag(np.repeat(eta, 2))
    s_inv = np.linalg.inv(params.symplectic)
    G = s_inv.T @ eta_mat @ s_inv
    c = float(-np.log(occ + 1.0).sum() + 0.25 * np.trace(eta_mat))
    return GaussianLogForm(G=G, c=c, displacement=params.displacement.copy())


def gaussian_entropy(nu_list: np.ndarray) -> float:
    """Entropy of a Gaussian state from its symplectic eigenvalues.

    sum_j [(nu+1/2) ln(nu+1/2) - (nu-1/2) ln(nu-1/2)], zero at nu = 1/2.
    """
    nu = np.atleast_1d(np.asarray(nu_list, dtype=float))
    if nu.min() < 0.5 - NU_TOL:
        raise ValueError(f"symplectic eigenvalue {nu.min():.6g} below 1/2")
    x = nu + 0.5
    y = np.clip(nu - 0.5, 0.0, None)
    terms = x * np.log(x) - np.where(y > 0.0, y * np.log(np.where(y > 0.0, y, 1.0)), 0.0)
    return float(terms.sum())


def _padded_config(config: ModeConfig, pad: tuple[int, ...] | None) -> ModeConfig:
    if pad is None:
        pad = tuple(max(10, d // 2) for d in config.cutoffs)
    cutoffs = tuple(d + p for d, p in zip(config.cutoffs, pad))
    return ModeConfig(cutoffs, max_dim=max(config.max_dim, math.prod(cutoffs)))


def _project_to(config: ModeConfig, padded: ModeConfig, data: np.ndarray) -> np.ndarray:
    """Keep the sub-block with all mode levels below the requested cutoffs."""
    t = data.reshape(padded.cutoffs + padded.cutoffs)
    sl = tuple(slice(0, d) for d in config.cutoffs)
    d = config.total_dim
    return np.ascontiguousarray(t[sl + sl]).reshape(d, d)


def _tail_check(rho: DensityMatrix, tail_tol: float):
    worst = max(float(p[-2:].sum()) for p in mode_populations(rho))
    if worst > tail_tol:
        raise TruncationError(
            f"top-two-level population {worst:.3e} exceeds {tail_tol:.0e}; "
            "increase cutoff"
        )


def synthesize_gaussian(
    params: GaussianParams,
    config: ModeConfig,
    tail_tol: float = 1e-8,
    pad: tuple[int, ...] | None = None,
) -> DensityMatrix:
    """Exponential-form Gaussian density matrix in the truncated basis.

    Builds -1/2 (R - d)^T G (R - d), exponentiates it by eigendecomposition
    and renormalizes to unit trace.  The quadratic form is assembled in a
    padded space (``pad`` extra levels per mode, default max(10, d/2)) so that
    the distorted top levels of the truncated operators stay outside the
    returned block; the state is then projected back to ``config`` and the
    absorbed leakage recorded.  Raises TruncationError when any mode's
    top-two-level population exceeds ``tail_tol``.
    """
    if params.num_modes != config.num_modes:
        raise ValueError(
            f"params have {params.num_modes} modes, config has {config.num_modes}"
        )
    lf = log_form(params)
    if np.linalg.cond(lf.G) > 1e12:
        raise ValueError("ill-conditioned Gaussian exponent (cond(G) > 1e12)")
    padded = _padded_config(config, pad)
    ops = build_operators(padded)
    dim = padded.total_dim
    eye = np.eye(dim)
    dR = [r - d * eye for r, d in zip(ops.R, lf.displacement)]
    H = np.zeros((dim, dim), dtype=complex)
    for l in range(2 * config.num_modes):
        y = sum(lf.G[l, m] * dR[m] for m in range(2 * config.num_modes))
        H -= 0.5 * (dR[l] @ y)
    H = 0.5 * (H + H.conj().T)

    w, U = np.linalg.eigh(H)
    shifted = np.exp(w - w.max())
    z = float(shifted.sum())
    full = (U * shifted) @ U.conj().T / z
    # Exact normalization would be exp(-c); the shortfall lies past the padding.
    pad_leak = 1.0 - float(np.exp(lf.c + w.max()) * z)

    block = _project_to(config, padded, full)
    kept = float(np.trace(block).real)
    rho = DensityMatrix(
        config=config,
        data=block / kept,
        leakage=1.0 - kept * (1.0 - pad_leak),
    )
    _tail_check(rho, tail_tol)
    return rho


def rotation_matrix(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def single_mode_symplectic(r: float, phi: float) -> np.ndarray:
    """S = R(phi) diag(e^r, e^-r) R(phi)^T — covers every single-mode gauge."""
    rot = rotation_matrix(phi)
    return rot @ np.diag([np.exp(r), np.exp(-r)]) @ rot.T


def displacement_from_alpha(alphas: np.ndarray) -> np.ndarray:
    """Quadrature displacement sqrt(2) (Re a_1, Im a_1, ...)."""
    a = np.atleast_1d(np.asarray(alphas, dtype=complex))
    d = np.empty(2 * a.size)
    d[0::2] = np.sqrt(2.0) * a.real
    d[1::2] = np.sqrt(2.0) * a.imag
    return d


def single_mode_gaussian(
    nbar: float,
    r: float = 0.0,
    phi: float = 0.0,
    alpha: complex = 0.0,
    cutoff: int = DEFAULT_CUTOFF,
    tail_tol: float = 1e-8,
) -> DensityMatrix:
    """Displaced squeezed thermal state of one mode.

    For nbar >= NBAR_FLOOR this goes through the exponential form; below the
    floor the state is pure and is built exactly as a displaced squeezed
    vacuum vector.
    """
    if nbar < 0:
        raise ValueError(f"mean occupancy must be nonnegative, got {nbar}")
    config = ModeConfig((cutoff,))
    if nbar >= NBAR_FLOOR:
        params = GaussianParams(
            occupancies=np.array([nbar]),
            symplectic=single_mode_symplectic(r, phi),
            displacement=displacement_from_alpha(np.array([alpha])),
        )
        return synthesize_gaussian(params, config, tail_tol=tail_tol)

    # Pure case: displaced squeezed vacuum vector, built with padding for the
    # same top-level-artifact reason as the exponential form.
    padded_dim = cutoff + max(10, cutoff // 2)
    a = annihilation(padded_dim)
    zeta = r * np.exp(2j * phi)
    sq = expm(0.5 * (zeta * (a.T @ a.T) - np.conj(zeta) * (a @ a)))
    disp = expm(alpha * a.T.astype(complex) - np.conj(alpha) * a.astype(complex))
    v0 = np.zeros(padded_dim, dtype=complex)
    v0[0] = 1.0
    psi = (disp @ (sq @ v0))[:cutoff]
    norm2 = float(np.vdot(psi, psi).real)
    rho = DensityMatrix(
        config=config,
        data=np.outer(psi, psi.conj()) / norm2,
        leakage=max(0.0, 1.0 - norm2),
    )
    _tail_check(rho, tail_tol)
    return rho


@dataclass(frozen=True)
class AssociateFit:
    """Williamson fit of a state's moments, with boundary bookkeeping."""

    params: GaussianParams
    nu: np.ndarray            # raw symplectic eigenvalues, unclamped
    boundary: bool            # True when any nbar was clamped at the floor


def fit_associate(m: Moments) -> AssociateFit:
    """Gaussian parameters sharing the given displacement and covariance."""
    S, nu = williamson(m.covariance)
    occ = np.clip(nu - 0.5, NBAR_FLOOR, None)
    boundary = bool((nu - 0.5 < NBAR_FLOOR).any())
    params = GaussianParams(
        occupancies=occ, symplectic=S, displacement=m.displacement.copy()
    )
    return AssociateFit(params=params, nu=nu, boundary=boundary)


def associate_gaussian(
    rho: DensityMatrix,
    ops: QuadratureOps | None = None,
    tail_tol: float = 1e-8,
) -> tuple[GaussianParams, DensityMatrix]:
    """The Gaussian state with the same first and second moments as ``rho``."""
    if ops is None:
        ops = build_operators(rho.config)
    fit = fit_associate(extract(rho, ops))
    tau = synthesize_gaussian(fit.params, rho.config, tail_tol=tail_tol)
    return fit.params, tau
