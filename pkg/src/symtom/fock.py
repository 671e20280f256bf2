"""Truncated Fock-basis states, canonical operators and oscillator eigenfunctions.

Single units convention used by the whole package: hbar = 1 with
Q = (a + a^dag)/sqrt(2) and P = (a - a^dag)/(i*sqrt(2)), so [Q, P] = i,
[a, a^dag] = 1 and the vacuum quadrature variance is 1/2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError

# Validation tolerances for density matrices; chosen so double-precision
# roundoff never trips them.
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
EIGENVALUE_TOL = 1e-10


def density_defects(matrix: np.ndarray) -> dict:
    """Measure how far a matrix is from being a valid density matrix.

    Returns a dict with keys ``hermiticity`` (max |rho - rho^dag|),
    ``trace`` (|Tr rho - 1|) and ``min_eigenvalue`` (smallest eigenvalue of
    the Hermitian part).
    """
    matrix = np.asarray(matrix, dtype=complex)
    herm = float(np.max(np.abs(matrix - matrix.conj().T)))
    trace = float(abs(np.trace(matrix) - 1.0))
    min_eig = float(np.linalg.eigvalsh(0.5 * (matrix + matrix.conj().T))[0])
    return {"hermiticity": herm, "trace": trace, "min_eigenvalue": min_eig}


def violated_invariants(defects: dict) -> list[str]:
    """Names of the density-matrix invariants violated by the given defects."""
    bad = []
    if defects["hermiticity"] > HERMITICITY_TOL:
        bad.append("hermiticity")
    if defects["trace"] > TRACE_TOL:
        bad.append("unit-trace")
    if defects["min_eigenvalue"] < -EIGENVALUE_TOL:
        bad.append("positivity")
    return bad


@dataclass(frozen=True)
class DensityState:
    """A density matrix on the truncated Fock space span{|0>, ..., |dim-1>}.

    The constructor enforces Hermiticity, unit trace and positive
    semidefiniteness (within the module tolerances) and freezes the array.
    """

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (self.dim, self.dim):
            raise InvalidInputError(
                f"matrix shape {matrix.shape} does not match dim {self.dim}"
            )
        defects = density_defects(matrix)
        bad = violated_invariants(defects)
        if bad:
            raise InvalidInputError(
                f"not a density matrix, violated: {', '.join(bad)} (defects {defects})"
            )
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    def purity(self) -> float:
        """Tr rho^2, the conventional-picture purity."""
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def make_pure(coefficients) -> DensityState:
    """Rank-1 density state |psi><psi| from Fock coefficients (normalized here)."""
    coeffs = np.asarray(coefficients, dtype=complex).ravel()
    norm = np.linalg.norm(coeffs)
    if coeffs.size == 0 or norm == 0.0:
        raise InvalidInputError("coefficient vector must be nonzero")
    psi = coeffs / norm
    return DensityState(psi.size, np.outer(psi, psi.conj()))


def make_thermal(nbar: float, dim: int) -> DensityState:
    """Thermal state with mean occupation ``nbar``, truncated and renormalized.

    Requires the truncated tail weight (nbar/(nbar+1))**dim to be below 1e-12.
    """
    if nbar < 0:
        raise InvalidInputError("nbar must be nonnegative")
    if dim < 1:
        raise InvalidInputError("dim must be positive")
    if nbar == 0:
        weights = np.zeros(dim)
        weights[0] = 1.0
        return DensityState(dim, np.diag(weights).astype(complex))
    q = nbar / (nbar + 1.0)
    if q**dim >= 1e-12:
        raise InvalidInputError(
            f"dim={dim} too small for nbar={nbar}: truncated tail weight {q**dim:.3e} >= 1e-12"
        )
    weights = (1.0 - q) * q ** np.arange(dim)
    weights /= weights.sum()
    return DensityState(dim, np.diag(weights).astype(complex))


def random_state(dim: int, seed=None, pure: bool = False) -> DensityState:
    """Random test state: Ginibre-induced mixed state, or a Haar-like pure state."""
    rng = np.random.default_rng(seed)
    if pure:
        coeffs = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return make_pure(coeffs)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    rho = 0.5 * (rho + rho.conj().T)
    return DensityState(dim, rho)


def embed(state: DensityState, dim: int) -> DensityState:
    """Zero-pad a state into a larger Fock truncation."""
    if dim < state.dim:
        raise InvalidInputError(f"cannot embed dim {state.dim} into smaller dim {dim}")
    if dim == state.dim:
        return state
    big = np.zeros((dim, dim), dtype=complex)
    big[: state.dim, : state.dim] = state.matrix
    return DensityState(dim, big)


@dataclass(frozen=True)
class CanonicalOperators:
    """Position and momentum matrices in the truncated Fock basis.

    The commutator [Q, P] = i*I is exact only on the top-left (dim-2) block;
    truncation corrupts the last rows and columns.
    """

    dim: int
    q_matrix: np.ndarray
    p_matrix: np.ndarray


def canonical_operators(dim: int) -> CanonicalOperators:
    """Tridiagonal Q and P matrices; Q = (a+a^dag)/sqrt(2), P = (a-a^dag)/(i*sqrt(2))."""
    if dim < 2:
        raise InvalidInputError("dim must be at least 2")
    off = np.sqrt(np.arange(1, dim) / 2.0)
    q = np.diag(off, 1) + np.diag(off, -1)
    p = -1j * np.diag(off, 1) + 1j * np.diag(off, -1)
    q = q.astype(complex)
    q.flags.writeable = False
    p.flags.writeable = False
    return CanonicalOperators(dim, q, p)


def hermite_function(n: int, x):
    """Orthonormal oscillator eigenfunction u_n(x), int u_n u_m dx = delta_nm.

    Evaluated by the normalized three-term recurrence with the Gaussian
    envelope folded in at every step, so it stays finite well past n = 512
    (factorial-based formulas overflow near n = 85).
    """
    if n < 0:
        raise InvalidInputError("n must be nonnegative")
    return hermite_table(n, x)[n]


def hermite_table(n_max: int, x) -> np.ndarray:
    """All u_0(x), ..., u_{n_max}(x) as an array of shape (n_max+1,) + x.shape."""
    if n_max < 0:
        raise InvalidInputError("n_max must be nonnegative")
    x = np.asarray(x, dtype=float)
    table = np.empty((n_max + 1,) + x.shape, dtype=float)
    table[0] = np.pi ** (-0.25) * np.exp(-0.5 * x * x)
    if n_max == 0:
        return table
    table[1] = np.sqrt(2.0) * x * table[0]
    for n in range(1, n_max):
        table[n + 1] = x * np.sqrt(2.0 / (n + 1)) * table[n] - np.sqrt(
            n / (n + 1.0)
        ) * table[n - 1]
    return table


def save_state(state: DensityState, path, metadata: dict | None = None) -> None:
    """Write a state to the JSON interchange format.

    Layout: {"dim": N, "rho_re": [[...]], "rho_im": [[...]]} plus an optional
    "metadata" block.
    """
    payload = {
        "dim": state.dim,
        "rho_re": np.real(state.matrix).tolist(),
        "rho_im": np.imag(state.matrix).tolist(),
    }
    if metadata is not None:
        payload["metadata"] = metadata
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True))


def load_state(path) -> DensityState:
    """Read a state from the JSON interchange format, validating all invariants.

    The error message names every violated invariant together with the
    measured defect, so callers can report exactly what failed.
    """
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read state file {path}: {exc}") from exc
    for key in ("dim", "rho_re", "rho_im"):
        if key not in payload:
            raise InvalidInputError(f"state file {path} missing field '{key}'")
    dim = int(payload["dim"])
    matrix = np.asarray(payload["rho_re"], dtype=float) + 1j * np.asarray(
        payload["rho_im"], dtype=float
    )
    if matrix.shape != (dim, dim):
        raise InvalidInputError(
            f"state file {path}: matrix shape {matrix.shape} does not match dim {dim}"
        )
    defects = density_defects(matrix)
    bad = violated_invariants(defects)
    if bad:
        raise InvalidInputError(
            f"state file {path} violates invariants: {', '.join(bad)} (defects {defects})"
        )
    return DensityState(dim, matrix)
