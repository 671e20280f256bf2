"""Positive-definiteness certification of tomogram-like functions.

A tomogram-like function f(X, mu, nu) is a quantum tomogram exactly when its
ray Fourier transform psi_f(mu, nu) = int f(X, mu, nu) e^{iX} dX lifts to a
positive-definite function on the Weyl-Heisenberg group. Three Gram-matrix
forms are provided for finite point tuples:

* ``gram_matrix_group``   -- M_jk = phi(g_j o g_k^{-1}) on WH(2), with
  phi(mu, nu, t) = e^{it} psi(mu, nu);
* ``gram_matrix_twisted`` -- the cocycle-twisted form on the translation
  group, M_jk = psi(v_k - v_j) e^{(i/2) omega(v_k, v_j)};
* ``gram_matrix_plain``   -- M_jk = psi(v_j - v_k) with no phase (ordinary
  Bochner positivity; passing it as well marks a classical tomogram).

For a genuine quantum state every matrix of the first two kinds is positive
semidefinite for every tuple; ``certify`` searches random tuples for
violations and can therefore only falsify, never prove. The e^{+iX}
frequency convention is fixed, with no sign knob.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidInputError,
    InvalidMatrixError,
    NotPositiveDefiniteError,
    QuadratureError,
)
from .heisenberg import GroupElement, PhasePoint, cocycle, compose, inverse, lift, _coords
from .tomogram import GridSpec, TomogramSource, check_homogeneity, check_nonnegativity, check_normalization, _ray

# decisive-failure thresholds for the defining-property checks inside certify;
# far above quadrature noise, far below any genuine violation
NORMALIZATION_FAIL = 1e-4
NONNEGATIVITY_FAIL = -1e-6
HOMOGENEITY_FAIL = 1e-4


def _trapezoid_weights(n: int, dx: float) -> np.ndarray:
    w = np.full(n, dx)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def _fourier_slice_points(src: TomogramSource, points, n_x: int = 2048, frequency: float = 1.0) -> np.ndarray:
    """Batched int f(X, v) e^{i*frequency*X} dX over an (n, 2) array of rays.

    Uses the substitution X = s*x so one unit-ray x-grid serves every point;
    homogeneous sources then put their mass inside a fixed window.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    half = src.x_halfwidth(1.0)
    x = np.linspace(-half, half, n_x)
    w = _trapezoid_weights(n_x, x[1] - x[0])
    out = np.empty(pts.shape[0], dtype=complex)
    for i, (mu, nu) in enumerate(pts):
        s = float(np.hypot(mu, nu))
        values = np.asarray(src.evaluate(s * x, (mu, nu)), dtype=float)
        out[i] = s * np.sum(values * w * np.exp(1j * frequency * s * x))
    return out


def fourier_slice(src: TomogramSource, v, quad: GridSpec | None = None) -> complex:
    """psi_f(mu, nu) = int f(X, mu, nu) e^{iX} dX along one ray.

    For state-derived sources this equals Tr[rho D(mu, nu)]. When ``quad`` is
    given the integral runs on its absolute window; otherwise the window is
    sized from the source's own mass heuristic.
    """
    mu, nu, _ = _ray(v)
    if quad is None:
        return complex(_fourier_slice_points(src, [[mu, nu]])[0])
    xs = quad.xs()
    w = _trapezoid_weights(quad.n_x, xs[1] - xs[0])
    values = np.asarray(src.evaluate(xs, (mu, nu)), dtype=float)
    return complex(np.sum(values * w * np.exp(1j * xs)))


@dataclass(frozen=True)
class GramMatrix:
    """Hermitian test matrix built from a candidate group function."""

    points: tuple
    matrix: np.ndarray
    kind: str  # one of {"wh-group", "omega-twisted", "classical"}


def gram_matrix_group(psi, elements) -> GramMatrix:
    """M_jk = phi(g_j o g_k^{-1}) on WH(2), phi the central lift e^{it} psi.

    The composition includes the cocycle contribution to the central
    coordinate, so the symplectic phase enters through the lift.
    """
    els = tuple(
        g if isinstance(g, GroupElement) else GroupElement(*map(float, g)) for g in elements
    )
    n = len(els)
    if not 1 <= n <= 64:
        raise InvalidInputError("need between 1 and 64 group elements")
    m = np.empty((n, n), dtype=complex)
    for j, gj in enumerate(els):
        for k, gk in enumerate(els):
            m[j, k] = lift(psi, compose(gj, inverse(gk)))
    return GramMatrix(els, m, "wh-group")


def gram_matrix_twisted(psi, points) -> GramMatrix:
    """Cocycle-twisted Gram matrix on the translation group.

    M_jk = psi(v_k - v_j) * exp((i/2) * omega(v_k, v_j)), the printed
    orientation; positive semidefinite exactly for quantum characteristic
    functions.
    """
    pts = tuple(PhasePoint(*_coords(p)) for p in points)
    n = len(pts)
    if not 1 <= n <= 64:
        raise InvalidInputError("need between 1 and 64 phase points")
    m = np.empty((n, n), dtype=complex)
    for j, vj in enumerate(pts):
        for k, vk in enumerate(pts):
            m[j, k] = psi(vk.mu - vj.mu, vk.nu - vj.nu) * np.exp(
                0.5j * cocycle(vk, vj)
            )
    return GramMatrix(pts, m, "omega-twisted")


def gram_matrix_plain(psi, points) -> GramMatrix:
    """Ordinary Bochner Gram matrix M_jk = psi(v_j - v_k), no cocycle phase."""
    pts = tuple(PhasePoint(*_coords(p)) for p in points)
    n = len(pts)
    if n < 1:
        raise InvalidInputError("need at least one phase point")
    m = np.empty((n, n), dtype=complex)
    for j, vj in enumerate(pts):
        for k, vk in enumerate(pts):
            m[j, k] = psi(vj.mu - vk.mu, vj.nu - vk.nu)
    return GramMatrix(pts, m, "classical")


def min_eigenvalue(gram: GramMatrix, herm_tol: float = 1e-8) -> float:
    """Smallest eigenvalue of a Hermitian Gram matrix.

    Raises InvalidMatrixError when the Hermiticity defect exceeds
    ``herm_tol`` (the generating function then violated
    psi(-v) = conj(psi(v)) beyond quadrature noise).
    """
    m = gram.matrix
    defect = float(np.max(np.abs(m - m.conj().T)))
    if defect > herm_tol:
        raise InvalidMatrixError(
            f"Gram matrix not Hermitian: defect {defect:.3e} > {herm_tol:.1e}"
        )
    return float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])


def gns_embed(gram: GramMatrix, rank_tol: float = 1e-12) -> np.ndarray:
    """Finite Gram factorization: vectors w_j with <w_j, w_k> = M_jk.

    The inner product conjugates the first argument, so the rows of the
    returned (n, r) array satisfy np.vdot(w[j], w[k]) == M[j, k]; r is the
    numerical rank. Eigenvalues in [-1e-10, 0) are clipped to zero; anything
    below raises NotPositiveDefiniteError.
    """
    m = gram.matrix
    m = 0.5 * (m + m.conj().T)
    eigvals, eigvecs = np.linalg.eigh(m)
    if eigvals[0] < -1e-10:
        raise NotPositiveDefiniteError(
            f"Gram matrix has eigenvalue {eigvals[0]:.3e} < -1e-10; no embedding exists"
        )
    eigvals = np.clip(eigvals, 0.0, None)
    keep = eigvals > rank_tol * max(1.0, float(eigvals[-1]))
    return eigvecs[:, keep].conj() * np.sqrt(eigvals[keep])[None, :]


@dataclass(frozen=True)
class CertificationReport:
    """Aggregated verdict of the randomized quantum-tomogram criterion.

    ``pass`` means no violation was found within the budget (the criterion
    quantifies over all tuples, so a finite search can only falsify);
    ``fail`` carries a witness tuple or a decisive property-check failure;
    ``inconclusive`` indicates quadrature trouble.
    """

    verdict: str
    trials: int
    tuple_size: int
    seed: int
    radius: float
    fail_tolerance: float
    min_eigenvalue_overall: float
    witness: tuple | None
    property_checks: dict
    source_kind: str
    diagnostics: tuple = field(default_factory=tuple)

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "trials": self.trials,
            "tuple_size": self.tuple_size,
            "seed": self.seed,
            "radius": self.radius,
            "fail_tolerance": self.fail_tolerance,
            "min_eigenvalue_overall": self.min_eigenvalue_overall,
            "witness": None
            if self.witness is None
            else [[p[0], p[1]] for p in self.witness],
            "property_checks": self.property_checks,
            "source_kind": self.source_kind,
            "diagnostics": list(self.diagnostics),
        }


def _property_checks(src: TomogramSource, rng: np.random.Generator) -> tuple[dict, bool, list]:
    """Run the three defining-property checks; returns (report, decisive_fail, notes)."""
    directions = src.ray_directions()
    if directions is None:
        rays = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
        for _ in range(3):
            angle = rng.uniform(0.0, 2.0 * np.pi)
            scale = rng.uniform(0.5, 2.0)
            rays.append((scale * np.cos(angle), scale * np.sin(angle)))
    else:
        rays = [tuple(d) for d in directions]
    report: dict = {"normalization": [], "nonnegativity": [], "homogeneity": None}
    notes = []
    decisive = False

    for mu, nu in rays:
        s = float(np.hypot(mu, nu))
        half = src.x_halfwidth(s)
        quad = GridSpec(-half, half, 801)
        try:
            norm = check_normalization(src, (mu, nu), quad)
        except QuadratureError as exc:
            notes.append(str(exc))
            continue
        ok = abs(norm - 1.0) <= NORMALIZATION_FAIL
        decisive |= not ok
        report["normalization"].append(
            {"ray": [mu, nu], "integral": norm, "pass": ok}
        )
        scan = check_nonnegativity(src, (mu, nu), quad)
        ok = scan.min_value >= NONNEGATIVITY_FAIL
        decisive |= not ok
        report["nonnegativity"].append(
            {"ray": [mu, nu], "min": scan.min_value, "argmin_x": scan.argmin_x, "pass": ok}
        )

    samples = []
    for _ in range(20):
        mu, nu = rays[rng.integers(len(rays))]
        lam = float(rng.uniform(0.25, 4.0) * rng.choice([-1.0, 1.0]))
        x = float(rng.uniform(-2.0, 2.0))
        samples.append((x, (mu, nu), lam))
    dev = check_homogeneity(src, samples)
    ok = dev <= HOMOGENEITY_FAIL
    decisive |= not ok
    report["homogeneity"] = {"max_deviation": dev, "samples": len(samples), "pass": ok}
    return report, decisive, notes


def certify(
    src: TomogramSource,
    trials: int = 200,
    tuple_size: int = 16,
    seed: int = 0,
    radius: float = 2.0,
    fail_tol: float | None = None,
) -> CertificationReport:
    """Randomized falsification of the quantum-tomogram criterion.

    Runs the defining-property checks, then draws ``trials`` Gaussian
    tuples of phase points (scale ``radius``), builds the cocycle-twisted
    Gram matrix on psi_f = fourier_slice(src, .) for each, and records the
    global minimum eigenvalue. The diagonal needs psi_f at (0, 0), which is
    taken as the normalization integral (the homogeneity-forced limit).

    Verdict: ``fail`` when any eigenvalue drops below -fail_tol (default
    1e-6 * tuple_size) or a property check fails decisively; ``pass``
    means no violation found; quadrature trouble yields ``inconclusive``.
    Deterministic and reproducible from (source, seed, trials, tuple_size,
    radius): trial tuples come from spawned child seeds and the report is a
    pure fold over trials in index order.
    """
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    if not 2 <= tuple_size <= 64:
        raise InvalidInputError("tuple_size must be between 2 and 64")
    if fail_tol is None:
        fail_tol = 1e-6 * tuple_size

    diagnostics: list[str] = []
    prop_rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    try:
        prop_report, prop_fail, notes = _property_checks(src, prop_rng)
        diagnostics.extend(notes)
    except QuadratureError as exc:
        return CertificationReport(
            "inconclusive", trials, tuple_size, seed, radius, fail_tol,
            float("nan"), None, {}, src.kind, (str(exc),),
        )

    # psi_f(0, 0) by continuity: the normalization integral along a reference ray
    directions = src.ray_directions()
    ref = (1.0, 0.0) if directions is None else tuple(directions[0])
    half = src.x_halfwidth(float(np.hypot(*ref)))
    try:
        psi_origin = complex(check_normalization(src, ref, GridSpec(-half, half, 801)))
    except QuadratureError as exc:
        return CertificationReport(
            "inconclusive", trials, tuple_size, seed, radius, fail_tol,
            float("nan"), None, prop_report, src.kind, tuple(diagnostics) + (str(exc),),
        )

    children = np.random.SeedSequence(seed).spawn(trials + 1)[1:]
    min_overall = np.inf
    witness = None
    quadrature_trouble = False
    for child in children:
        rng = np.random.default_rng(child)
        if directions is None:
            pts = rng.normal(0.0, radius, size=(tuple_size, 2))
        else:
            d = np.asarray(directions[rng.integers(len(directions))], dtype=float)
            d /= np.hypot(*d)
            pts = np.outer(rng.normal(0.0, radius, size=tuple_size), d)

        diffs = pts[None, :, :] - pts[:, None, :]  # diffs[j, k] = v_k - v_j
        flat = diffs.reshape(-1, 2)
        offdiag = ~np.all(flat == 0.0, axis=1)
        try:
            values = np.empty(flat.shape[0], dtype=complex)
            values[~offdiag] = psi_origin
            values[offdiag] = _fourier_slice_points(src, flat[offdiag])
        except QuadratureError as exc:
            diagnostics.append(str(exc))
            quadrature_trouble = True
            continue
        table = {(float(p[0]), float(p[1])): val for p, val in zip(flat, values)}
        psi = lambda mu, nu: table[(mu, nu)]
        gram = gram_matrix_twisted(psi, pts)
        low = min_eigenvalue(gram, herm_tol=1e-6)
        if low < min_overall:
            min_overall = low
            witness = tuple((float(p[0]), float(p[1])) for p in pts)

    eig_fail = min_overall < -fail_tol
    if quadrature_trouble and not (eig_fail or prop_fail):
        verdict = "inconclusive"
    elif eig_fail or prop_fail:
        verdict = "fail"
    else:
        verdict = "pass"
    return CertificationReport(
        verdict,
        trials,
        tuple_size,
        seed,
        radius,
        fail_tol,
        float(min_overall),
        witness,
        prop_report,
        src.kind,
        tuple(diagnostics),
    )
