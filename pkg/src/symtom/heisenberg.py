"""Weyl-Heisenberg group WH(2) and its displacement-operator representation.

Group elements are (mu, nu, t) with the symplectic cocycle
omega((mu,nu),(mu',nu')) = mu*nu' - nu*mu'. Displacement operators
D(mu,nu) = exp(i*(mu*Q + nu*P)) are built either by matrix exponential
(the slow oracle) or from the associated-Laguerre closed form (fast path,
exact matrix elements). Two constants are fixed by this package's
Q = (a+a^dag)/sqrt(2) convention and frozen by regression tests:

* coherent amplitude alpha(mu, nu) = (i*mu - nu)/sqrt(2), i.e.
  D(mu,nu) = exp(alpha*a^dag - conj(alpha)*a);
* projective composition D(v) D(w) = exp(-i/2 * omega(v,w)) * D(v+w).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import InvalidInputError, TruncationError
from .fock import DensityState, canonical_operators

#: sign s in D(v) D(w) = exp(-i/2 * s * omega(v, w)) D(v+w)
COMPOSITION_SIGN = 1.0

#: default truncation buffer: displacement matrices are trusted only on the
#: top-left (dim - dim//4) block
def default_buffer(dim: int) -> int:
    return dim // 4


@dataclass(frozen=True)
class PhasePoint:
    """A point (mu, nu) of the translation group, WH(2) modulo its center."""

    mu: float
    nu: float


@dataclass(frozen=True)
class GroupElement:
    """A Weyl-Heisenberg group element (mu, nu, t) with central parameter t."""

    mu: float
    nu: float
    t: float


IDENTITY = GroupElement(0.0, 0.0, 0.0)


def _coords(v) -> tuple[float, float]:
    """Accept PhasePoint, GroupElement or a (mu, nu) pair."""
    if isinstance(v, (PhasePoint, GroupElement)):
        return float(v.mu), float(v.nu)
    mu, nu = v
    return float(mu), float(nu)


def cocycle(v, w) -> float:
    """Symplectic form omega(v, w) = mu*nu' - nu*mu'."""
    mu, nu = _coords(v)
    mu2, nu2 = _coords(w)
    return mu * nu2 - nu * mu2


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """Group law (mu,nu,t) o (mu',nu',t') = (mu+mu', nu+nu', t+t'+omega/2)."""
    return GroupElement(
        g.mu + h.mu,
        g.nu + h.nu,
        g.t + h.t + 0.5 * cocycle(g, h),
    )


def inverse(g: GroupElement) -> GroupElement:
    """Group inverse (-mu, -nu, -t); omega(v, -v) = 0 so no cocycle correction."""
    return GroupElement(-g.mu, -g.nu, -g.t)


def project(g: GroupElement) -> PhasePoint:
    """Quotient projection onto the translation group (drop t)."""
    return PhasePoint(g.mu, g.nu)


def symplectic_params(lam: float, theta: float) -> PhasePoint:
    """Scaling-rotation parametrization (e^lam*cos(theta), e^-lam*sin(theta)).

    Convenience only: this map does not reach all of R^2 (for instance
    mu*nu = sin(2*theta)/2 is bounded), so (mu, nu) remain the primary
    coordinates everywhere in the package.
    """
    return PhasePoint(np.exp(lam) * np.cos(theta), np.exp(-lam) * np.sin(theta))


@dataclass(frozen=True)
class DisplacementMatrix:
    """Truncated matrix of D(mu,nu) = exp(i*(mu*Q + nu*P)) in the Fock basis."""

    dim: int
    matrix: np.ndarray
    mu: float
    nu: float


def coherent_amplitude(v) -> complex:
    """The frozen map (mu, nu) -> alpha with D(mu,nu) = exp(alpha*a^dag - conj(alpha)*a)."""
    mu, nu = _coords(v)
    return complex(1j * mu - nu) / np.sqrt(2.0)


def displacement_block(alphas: np.ndarray, dim: int) -> np.ndarray:
    """Exact Fock matrix elements of displacement operators, batched.

    Returns shape (len(alphas), dim, dim). Entries are the
    infinite-dimensional matrix elements
    <m|D|n> = sqrt(n!/m!) alpha^(m-n) e^{-|alpha|^2/2} L_n^{(m-n)}(|alpha|^2)
    evaluated by the three-term Laguerre recurrence along each diagonal
    (O(dim^2) per point, no factorial overflow below dim ~ 150).
    """
    alphas = np.asarray(alphas, dtype=complex).ravel()
    n_pts = alphas.size
    x = np.abs(alphas) ** 2
    envelope = np.exp(-0.5 * x)
    out = np.zeros((n_pts, dim, dim), dtype=complex)

    lg = gammaln(np.arange(1, dim + 1))  # log(k!) for k = 0..dim-1
    for d in range(dim):
        ks = np.arange(dim - d)
        # sqrt(k!/(k+d)!) for each lower index k on this diagonal
        prefactor = np.exp(0.5 * (lg[ks] - lg[ks + d]))
        upper_pow = alphas**d  # alpha^(m-n) on the lower triangle m = n+d
        lower_pow = (-alphas.conj()) ** d
        # Laguerre recurrence in the lower index k at fixed superscript d
        lag_prev = np.zeros(n_pts)
        lag = np.ones(n_pts)
        for k in range(dim - d):
            value = envelope * prefactor[k] * lag
            out[:, k + d, k] = value * upper_pow
            if d > 0:
                out[:, k, k + d] = value * lower_pow
            else:
                out[:, k, k] = value
            lag_next = ((2 * k + 1 + d - x) * lag - (k + d) * lag_prev) / (k + 1)
            lag_prev, lag = lag, lag_next
    return out


def displacement_closed_form(v, dim: int) -> DisplacementMatrix:
    """Fast displacement matrix from the Laguerre closed form (exact elements)."""
    if dim < 2:
        raise InvalidInputError("dim must be at least 2")
    mu, nu = _coords(v)
    block = displacement_block(np.array([coherent_amplitude(v)]), dim)[0]
    return DisplacementMatrix(dim, block, mu, nu)


@lru_cache(maxsize=256)
def _expm_cached(mu: float, nu: float, dim: int) -> np.ndarray:
    ops = canonical_operators(dim)
    matrix = expm(1j * (mu * ops.q_matrix + nu * ops.p_matrix))
    matrix.flags.writeable = False
    return matrix


def displacement_expm(v, dim: int) -> DisplacementMatrix:
    """Oracle displacement matrix: scipy matrix exponential of i(mu*Q + nu*P).

    O(dim^3); results are memoized (read-mostly cache, safe for concurrent
    readers). Only the top-left buffered block is trustworthy, see
    ``unitarity_defect``.
    """
    if dim < 2:
        raise InvalidInputError("dim must be at least 2")
    mu, nu = _coords(v)
    return DisplacementMatrix(dim, _expm_cached(mu, nu, dim), mu, nu)


def truncation_defect(v, dim: int, buffer: int | None = None) -> float:
    """Estimate of the truncation error of displacement_expm on its buffered block.

    expm of the truncated generator is exactly unitary at any dim, so
    unitarity itself cannot detect corruption; instead the matrix at ``dim``
    is compared against the one at ``dim + 2*buffer`` on the top-left
    (dim - buffer) block (self-convergence). Values above ~1e-8 mean the
    requested (mu, nu) mixes Fock levels past the truncation edge and the
    buffered block should not be trusted.
    """
    b = default_buffer(dim) if buffer is None else buffer
    keep = dim - b
    small = displacement_expm(v, dim).matrix
    big = displacement_expm(v, dim + 2 * b).matrix
    return float(np.max(np.abs(small[:keep, :keep] - big[:keep, :keep])))


def characteristic_function(
    rho: DensityState, v, method: str = "closed", dim: int | None = None
) -> complex:
    """psi_rho(mu, nu) = Tr[rho D(mu, nu)].

    ``method='closed'`` uses the exact Laguerre matrix elements on the state's
    own block. ``method='expm'`` exponentiates at truncation ``dim`` (default
    rho.dim plus a buffer) and raises TruncationError when the buffered-block
    unitarity check fails.
    """
    mu, nu = _coords(v)
    if method == "closed":
        return complex(characteristic_on_points(rho, np.array([[mu, nu]]))[0])
    if method != "expm":
        raise InvalidInputError(f"unknown method '{method}'")
    if dim is None:
        dim = rho.dim + max(16, rho.dim // 2)
    if dim < rho.dim:
        raise InvalidInputError("evaluation dim must be >= rho.dim")
    defect = truncation_defect((mu, nu), dim)
    if defect > 1e-8:
        raise TruncationError(
            f"displacement at ({mu}, {nu}) untrustworthy at dim {dim}: "
            f"buffered-block truncation defect {defect:.3e}"
        )
    disp = displacement_expm((mu, nu), dim)
    block = disp.matrix[: rho.dim, : rho.dim]
    return complex(np.trace(rho.matrix @ block))


def characteristic_on_points(rho: DensityState, points) -> np.ndarray:
    """Vectorized Tr[rho D(v_i)] over an (n, 2) array of phase points.

    Uses the closed-form displacement block restricted to the state's own
    Fock block, which is exact (independent of any larger truncation).
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    alphas = (1j * pts[:, 0] - pts[:, 1]) / np.sqrt(2.0)
    blocks = displacement_block(alphas, rho.dim)
    # Tr[rho D] = sum_{mn} rho_mn D_nm
    return np.einsum("mn,inm->i", rho.matrix, blocks)


def lift(psi, g: GroupElement) -> complex:
    """Lift of a translation-group function to WH(2): phi(mu,nu,t) = e^{it} psi(mu,nu)."""
    return np.exp(1j * g.t) * psi(g.mu, g.nu)
