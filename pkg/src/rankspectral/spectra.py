"""Eigenvalue solvers and spectral summaries for packed symmetric matrices.

Two routes to the spectrum are kept deliberately independent so they can
cross-check each other: power iterations running directly on the packed
storage via BLAS ``dspmv`` (:func:`leading_eigenpair`, :func:`operator_norm`),
and the dense LAPACK path (:func:`full_spectrum`, Householder
tridiagonalization plus implicit-shift QL via ``dsyev``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh
from scipy.linalg.blas import dspmv

from .rng import make_generator
from .symmetric import SymmetricMatrix, pair_indices

FULL_SPECTRUM_CAP = 4000

_RESTART_SEED = 0x5EED0F0B


class ConvergenceError(RuntimeError):
    """An iterative or LAPACK eigensolver failed to converge."""


@dataclass(frozen=True)
class EigenPair:
    """Leading eigenvalue and unit eigenvector.

    ``residual`` is ||M v - value * v||_2 at the accepted iterate; it
    satisfies residual <= tol * (|value| + ||M||_F / sqrt(n)). ``iterations``
    counts matrix-vector products. The vector's sign is fixed so that its
    component sum is positive.
    """

    value: float
    vector: np.ndarray
    iterations: int
    residual: float


def _packed_blas(matrix: SymmetricMatrix) -> np.ndarray:
    """Upper-packed BLAS buffer: ap[j(j+1)/2 + i] = entry (i, j), i <= j."""
    rows, cols = pair_indices(matrix.n)
    ap = np.zeros(matrix.n * (matrix.n + 1) // 2)
    ap[cols * (cols + 1) // 2 + rows] = matrix.values
    return ap


def _frobenius(matrix: SymmetricMatrix) -> float:
    return math.sqrt(2.0 * float(matrix.values @ matrix.values))


def _fix_sign(v: np.ndarray) -> np.ndarray:
    s = v.sum()
    if s == 0.0:
        nz = v[v != 0.0]
        s = nz[0] if nz.size else 1.0
    return -v if s < 0.0 else v


def leading_eigenpair(
    matrix: SymmetricMatrix,
    tol: float = 1e-12,
    max_iter: int = 10_000,
    start: np.ndarray | None = None,
) -> EigenPair:
    """Largest eigenvalue and its eigenvector by power iteration.

    Assumes the leading eigenvalue strictly dominates in modulus, which
    holds for matrices with positive off-diagonal entries (so for every
    rank matrix with n >= 3) and, with overwhelming probability, for the
    mean-shifted models used elsewhere in this package.

    Iterates v <- Mv / ||Mv|| from ``start`` (default: the constant unit
    vector) with Rayleigh-quotient estimates. Terminates when the relative
    eigenvalue change stays below ``tol`` on two consecutive iterations and
    the residual bound recorded on :class:`EigenPair` holds. If the iterate
    converges onto an eigenpair whose value is below n/4 (possible when the
    start vector is nearly orthogonal to the dominant eigenvector), the
    iteration restarts once from a fixed-seed random vector; spiked matrices
    have their dominant eigenvalue of order n/2, far above that floor.

    Raises
    ------
    ConvergenceError
        ``max_iter`` matrix-vector products without convergence, which
        signals a near-degenerate leading pair.
    """
    n = matrix.n
    if start is None:
        v = np.full(n, 1.0 / math.sqrt(n))
    else:
        v = np.array(start, dtype=np.float64)
        if v.shape != (n,):
            raise ValueError(f"start vector must have shape ({n},)")
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ValueError("start vector must be nonzero")
        v /= norm
    ap = _packed_blas(matrix)
    resid_floor = _frobenius(matrix) / math.sqrt(n)
    lam_prev = math.inf
    streak = 0
    restarted = False
    for iteration in range(1, max_iter + 1):
        w = dspmv(n, 1.0, ap, v)
        lam = float(v @ w)
        residual = float(np.linalg.norm(w - lam * v))
        streak = streak + 1 if abs(lam - lam_prev) <= tol * abs(lam) else 0
        lam_prev = lam
        if streak >= 2 and residual <= tol * (abs(lam) + resid_floor):
            if lam < n / 4.0 and not restarted:
                # Stalled on a minor eigenpair; one restart from a generic
                # direction recovers the dominant one.
                restarted = True
                v = make_generator(_RESTART_SEED).standard_normal(n)
                v /= np.linalg.norm(v)
                lam_prev = math.inf
                streak = 0
                continue
            return EigenPair(
                value=lam,
                vector=_fix_sign(v),
                iterations=iteration,
                residual=residual,
            )
        wnorm = float(np.linalg.norm(w))
        if wnorm == 0.0:
            # v is an exact kernel vector. Restart once in case the start
            # was degenerate; seeing a zero image again means M is the zero
            # matrix (a random vector hits a proper kernel with probability
            # zero), for which (0, v) is the answer.
            if restarted:
                return EigenPair(
                    value=0.0, vector=_fix_sign(v), iterations=iteration, residual=0.0
                )
            restarted = True
            v = make_generator(_RESTART_SEED).standard_normal(n)
            v /= np.linalg.norm(v)
            lam_prev = math.inf
            streak = 0
            continue
        v = w / wnorm
    raise ConvergenceError(
        f"no convergence in {max_iter} iterations (tol={tol}); "
        f"leading eigenvalues may be nearly degenerate"
    )


def full_spectrum(matrix: SymmetricMatrix, max_n: int = FULL_SPECTRUM_CAP) -> np.ndarray:
    """All eigenvalues, descending, via LAPACK ``dsyev``.

    The packed values are expanded to a dense array (the packed-storage
    LAPACK drivers are not exposed by scipy). Dimensions above ``max_n``
    are refused to keep memory and run time predictable.

    Raises
    ------
    ValueError
        ``matrix.n > max_n``.
    ConvergenceError
        The QL sweep cap inside ``dsyev`` was exhausted, or the eigenvalue
        sum drifted away from the (zero) trace.
    """
    if matrix.n > max_n:
        raise ValueError(
            f"n={matrix.n} exceeds the dense-solver cap {max_n}; "
            f"raise max_n explicitly if you accept the cost"
        )
    try:
        eigs = eigh(
            matrix.dense(),
            eigvals_only=True,
            driver="ev",
            check_finite=False,
            overwrite_a=True,
        )
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"dense eigensolver failed: {exc}") from exc
    drift = abs(float(eigs.sum()))
    budget = 64.0 * matrix.n * np.finfo(np.float64).eps * max(1.0, _frobenius(matrix))
    if drift > budget:
        raise ConvergenceError(
            f"eigenvalue sum {drift:.3e} inconsistent with zero trace "
            f"(budget {budget:.3e})"
        )
    return eigs[::-1]


def operator_norm(
    matrix: SymmetricMatrix,
    tol: float = 1e-13,
    max_iter: int = 500_000,
) -> float:
    """Spectral norm max(|lambda_max|, |lambda_min|) by shifted power iteration.

    Runs two power iterations on the positive semidefinite shifts M + sI
    and sI - M with s = n * max|entry|, which bounds the spectrum by
    Gershgorin's theorem. Each pass terminates when the relative change of
    the shifted Rayleigh quotient stays below ``tol`` on two consecutive
    iterations. Convergence is slow when eigenvalues cluster at the edge
    (centered rank matrices are the worst case); prefer
    :func:`full_spectrum` when the dense solve is affordable.
    """
    amax = float(np.abs(matrix.values).max(initial=0.0))
    if amax == 0.0:
        return 0.0
    n = matrix.n
    shift = n * amax
    ap = _packed_blas(matrix)
    lam_max = _shifted_power(ap, n, shift, +1.0, tol, max_iter)
    lam_min = -_shifted_power(ap, n, shift, -1.0, tol, max_iter)
    return max(abs(lam_max), abs(lam_min))


def _shifted_power(
    ap: np.ndarray, n: int, shift: float, sign: float, tol: float, max_iter: int
) -> float:
    """Dominant eigenvalue of sign*M + shift*I, minus the shift."""
    v = make_generator(_RESTART_SEED).standard_normal(n)
    v /= np.linalg.norm(v)
    lam_prev = math.inf
    streak = 0
    for _ in range(max_iter):
        w = dspmv(n, sign, ap, v)
        w += shift * v
        lam = float(v @ w)
        streak = streak + 1 if abs(lam - lam_prev) <= tol * abs(lam) else 0
        lam_prev = lam
        if streak >= 2:
            return lam - shift
        wnorm = float(np.linalg.norm(w))
        if wnorm == 0.0:
            return -shift
        v = w / wnorm
    raise ConvergenceError(
        f"shifted power iteration: no convergence in {max_iter} iterations (tol={tol})"
    )


def semicircle_cdf(x):
    """CDF of the semicircle distribution on [-2, 2].

    F(x) = 1/2 + x sqrt(4 - x^2) / (4 pi) + arcsin(x/2) / pi, clamped to
    0 and 1 outside the support. Accepts scalars or arrays.
    """
    arr = np.clip(np.asarray(x, dtype=np.float64), -2.0, 2.0)
    out = 0.5 + arr * np.sqrt(4.0 - arr * arr) / (4.0 * math.pi) + np.arcsin(arr / 2.0) / math.pi
    out = np.clip(out, 0.0, 1.0)
    return float(out) if np.isscalar(x) else out


@dataclass(frozen=True)
class ESDSummary:
    """Histogram of the scaled spectrum and its distance to the semicircle.

    ``bin_edges`` has one more element than ``masses``; masses sum to 1.
    ``ks_to_semicircle`` is the Kolmogorov-Smirnov distance between the
    empirical distribution of the scaled eigenvalues and the semicircle law.
    """

    bin_edges: np.ndarray
    masses: np.ndarray
    ks_to_semicircle: float


def esd(matrix: SymmetricMatrix, bins: int = 80) -> ESDSummary:
    """Empirical spectral distribution of n^{-1/2} * matrix.

    For a whitened rank matrix this converges to the semicircle law on
    [-2, 2]; the histogram range [-2.5, 2.5] leaves the edges visible.
    """
    eigs = full_spectrum(matrix) / math.sqrt(matrix.n)
    return esd_from_eigenvalues(eigs, bins)


def esd_from_eigenvalues(scaled_eigenvalues: np.ndarray, bins: int = 80) -> ESDSummary:
    """Build an :class:`ESDSummary` from already-scaled eigenvalues."""
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    eigs = np.asarray(scaled_eigenvalues, dtype=np.float64)
    n = eigs.shape[0]
    counts, edges = np.histogram(np.clip(eigs, -2.5, 2.5), bins=bins, range=(-2.5, 2.5))
    ordered = np.sort(eigs)
    cdf = semicircle_cdf(ordered)
    grid = np.arange(n, dtype=np.float64)
    ks = max(float(np.max(cdf - grid / n)), float(np.max((grid + 1.0) / n - cdf)))
    return ESDSummary(bin_edges=edges, masses=counts / n, ks_to_semicircle=ks)


def subspace_distance_sq(u: np.ndarray, v: np.ndarray) -> float:
    """Squared Frobenius distance between rank-one projectors uu^T and vv^T.

    Equals 2 (1 - (u . v)^2) for unit vectors, invariant to the sign of
    either vector; 0 iff u = +-v, maximum 2 at orthogonality.
    """
    uu = np.asarray(u, dtype=np.float64)
    vv = np.asarray(v, dtype=np.float64)
    if uu.shape != vv.shape or uu.ndim != 1:
        raise ValueError("u and v must be 1-d arrays of equal length")
    for name, vec in (("u", uu), ("v", vv)):
        if abs(np.linalg.norm(vec) - 1.0) > 1e-8:
            raise ValueError(f"{name} must be a unit vector (within 1e-8)")
    dot = float(uu @ vv)
    return max(0.0, 2.0 * (1.0 - dot * dot))
