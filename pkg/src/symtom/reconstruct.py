"""Inverse quantum Radon transform, purity functionals and roundtrip metrics.

The reconstruction accumulates

    rho' = (1/2pi) int psi_f(mu, nu) D(-mu, -nu) dmu dnu,

with psi_f the ray Fourier transform of the tomogram, over a uniform tensor
grid on a square of half-width R masked to the disk |v| <= R. The raw
operator is returned with diagnostics; projecting onto the state cone is a
separate, explicit validation step, mirroring the split between the
inversion formula and the nonnegativity check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .fock import DensityState, density_defects, embed
from .heisenberg import displacement_block
from .positivity import _fourier_slice_points
from .tomogram import StateTomogram, TomogramSource

_CHUNK = 2048  # phase-space nodes per displacement batch, keeps arrays ~100 MB


def _disk_nodes(radius: float, nodes: int):
    """Disk-masked uniform tensor grid on [-R, R]^2 and its quadrature weight."""
    if nodes < 2:
        raise InvalidInputError("need at least a 2x2 node grid")
    axis = np.linspace(-radius, radius, nodes)
    step = axis[1] - axis[0]
    mu, nu = np.meshgrid(axis, axis, indexing="ij")
    pts = np.column_stack([mu.ravel(), nu.ravel()])
    inside = np.hypot(pts[:, 0], pts[:, 1]) <= radius
    pts = pts[inside]
    keep = np.hypot(pts[:, 0], pts[:, 1]) > 0.0  # degenerate ray excluded
    return pts[keep], step * step


@dataclass(frozen=True)
class ReconstructionResult:
    """Raw inverse-Radon output plus self-consistent diagnostics."""

    rho: np.ndarray
    dim: int
    trace: float
    min_eigenvalue: float
    hermiticity_defect: float
    disk_radius: float
    nodes: int

    @classmethod
    def from_operator(cls, rho: np.ndarray, disk_radius: float, nodes: int):
        rho = np.asarray(rho, dtype=complex)
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        trace = float(np.real(np.trace(rho)))
        min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        return cls(rho, rho.shape[0], trace, min_eig, herm, disk_radius, nodes)


def inverse_radon(
    src: TomogramSource, dim: int, radius: float = 8.0, nodes: int = 128
) -> ReconstructionResult:
    """Reconstruct the density operator of a tomogram source at truncation dim.

    psi_f is evaluated on the disk grid by the ray Fourier transform and
    paired with exact closed-form displacement blocks D(-v). Nodes are summed
    in a fixed order, so results are bit-reproducible. No state validity is
    enforced here; see ``validate_as_state``.
    """
    if dim < 2:
        raise InvalidInputError("dim must be at least 2")
    pts, weight = _disk_nodes(radius, nodes)
    rho = np.zeros((dim, dim), dtype=complex)
    for start in range(0, pts.shape[0], _CHUNK):
        chunk = pts[start : start + _CHUNK]
        psi = _fourier_slice_points(src, chunk)
        alphas = (1j * (-chunk[:, 0]) - (-chunk[:, 1])) / np.sqrt(2.0)
        blocks = displacement_block(alphas, dim)
        rho += np.einsum("i,imn->mn", psi, blocks)
    rho *= weight / (2.0 * np.pi)
    return ReconstructionResult.from_operator(rho, radius, nodes)


@dataclass(frozen=True)
class ValidationOutcome:
    """Result of checking a reconstruction against the density-state axioms."""

    accepted: bool
    state: DensityState | None
    defects: dict


def validate_as_state(result: ReconstructionResult, tol: float = 1e-3) -> ValidationOutcome:
    """Accept a reconstruction as a DensityState, or reject with evidence.

    Accepts iff hermiticity defect <= tol, |trace - 1| <= tol and the minimal
    eigenvalue >= -tol; on acceptance the operator is symmetrized, negligible
    negative eigenvalues are clipped, and the trace renormalized. Rejection
    is a value, not an error.
    """
    defects = {
        "hermiticity": result.hermiticity_defect,
        "trace": abs(result.trace - 1.0),
        "min_eigenvalue": result.min_eigenvalue,
    }
    ok = (
        defects["hermiticity"] <= tol
        and defects["trace"] <= tol
        and defects["min_eigenvalue"] >= -tol
    )
    if not ok:
        return ValidationOutcome(False, None, defects)
    herm = 0.5 * (result.rho + result.rho.conj().T)
    eigvals, eigvecs = np.linalg.eigh(herm)
    eigvals = np.clip(eigvals, 0.0, None)
    projected = (eigvecs * eigvals) @ eigvecs.conj().T
    projected /= np.real(np.trace(projected))
    return ValidationOutcome(True, DensityState(result.dim, projected), defects)


def purity_from_characteristic(
    src: TomogramSource, radius: float = 8.0, nodes: int = 128
) -> float:
    """Tr rho^2 = (1/2pi) int |psi_f(v)|^2 dv over the disk of given radius."""
    pts, weight = _disk_nodes(radius, nodes)
    total = 0.0
    for start in range(0, pts.shape[0], _CHUNK):
        chunk = pts[start : start + _CHUNK]
        psi = _fourier_slice_points(src, chunk)
        total += float(np.sum(np.abs(psi) ** 2))
    return total * weight / (2.0 * np.pi)


def purity_from_tomogram(
    src: TomogramSource,
    radius: float = 8.0,
    nodes: int = 128,
    mode: str = "factorized",
    x_points: int = 257,
) -> float:
    """Purity from the double tomogram integral
    (1/2pi) int W(X, v) W(Y, -v) e^{i(X+Y)} dX dY dv.

    ``factorized`` splits the X and Y integrals into
    psi_f(v) * psi_f(-v) = |psi_f(v)|^2 and reduces to
    purity_from_characteristic on the same grid (bit-identical by
    construction). ``direct`` evaluates the full (X, Y) double sum per node
    on a coarser grid as an independent validation of the same formula.
    """
    if mode == "factorized":
        return purity_from_characteristic(src, radius=radius, nodes=nodes)
    if mode != "direct":
        raise InvalidInputError(f"unknown mode '{mode}'")
    pts, weight = _disk_nodes(radius, nodes)
    half = src.x_halfwidth(1.0)
    x = np.linspace(-half, half, x_points)
    w = np.full(x_points, x[1] - x[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    total = 0.0 + 0.0j
    for mu, nu in pts:
        s = float(np.hypot(mu, nu))
        wx = np.asarray(src.evaluate(s * x, (mu, nu)), dtype=float)
        wy = np.asarray(src.evaluate(s * x, (-mu, -nu)), dtype=float)
        phase = np.exp(1j * s * x)
        # full double sum over the (X, Y) grid, substituted X = s x, Y = s y
        total += s * s * np.einsum(
            "i,j->", wx * w * phase, wy * w * phase
        )
    return float(np.real(total) * weight / (2.0 * np.pi))


def state_fidelity(a: DensityState, b: DensityState) -> float:
    """Uhlmann fidelity Tr sqrt(sqrt(a) b sqrt(a)), in [0, 1], 1 iff equal.

    States of different truncation are compared after zero-padding the
    smaller one.
    """
    dim = max(a.dim, b.dim)
    am = embed(a, dim).matrix
    bm = embed(b, dim).matrix
    avals, avecs = np.linalg.eigh(am)
    sqrt_a = (avecs * np.sqrt(np.clip(avals, 0.0, None))) @ avecs.conj().T
    inner = sqrt_a @ bm @ sqrt_a
    vals = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    return float(np.sum(np.sqrt(np.clip(vals, 0.0, None))))


def tomographic_roundtrip_error(
    rho: DensityState, dim: int, radius: float = 8.0, nodes: int = 128
) -> float:
    """Frobenius distance between a state and its tomogram-reconstruction."""
    result = inverse_radon(StateTomogram(rho), dim, radius=radius, nodes=nodes)
    reference = embed(rho, dim).matrix
    return float(np.linalg.norm(result.rho - reference))
