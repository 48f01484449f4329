"""Hypothesis tests built on the leading eigenpair of the rank matrix.

Under the null (all entries i.i.d. from one continuous law) the leading
eigenvalue of the rank matrix, centered at (n-1)/2 + 2 sigma_n^2 and scaled
by sigma_tilde = sigma_n^2 sqrt(8/n), is asymptotically standard normal, no
matter which continuous law generated the data. Latent block structure
inflates the eigenvalue, so large |T| is evidence against the null.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .models import EntryDistribution, Normal, as_distribution
from .ranking import TiePolicy, moments, rank_transform
from .rng import make_generator
from .spectra import leading_eigenpair
from .symmetric import SymmetricMatrix

# Two-sided 5% cutoff, pinned so reports do not drift with library versions.
Z_0025 = 1.9599639845

_ALTERNATIVES = ("two-sided", "greater")


def std_normal_cdf(x):
    """Standard normal CDF via erfc; exact 0/1 beyond |x| = 40.

    Accepts scalars or arrays; absolute error below 1e-12 everywhere.
    """
    arr = np.asarray(x, dtype=np.float64)
    out = 0.5 * special.erfc(-arr / math.sqrt(2.0))
    out = np.where(arr < -40.0, 0.0, out)
    out = np.where(arr > 40.0, 1.0, out)
    return float(out) if arr.ndim == 0 else out


def eigenvalue_statistic(lambda1: float, n: int) -> float:
    """Standardize a leading eigenvalue: (lambda1 - centering) / sigma_tilde."""
    if n < 3:
        raise ValueError("the statistic needs n >= 3 (the scale is 0 at n=2)")
    m = moments(n)
    return (lambda1 - m.centering) / m.sigma_tilde


def eigenvector_statistic(uhat: np.ndarray, n: int) -> float:
    """Standardized alignment of the leading eigenvector with the constant vector.

    For the sign-fixed unit eigenvector uhat, the overlap u1 . uhat with
    u1 = n^{-1/2} (1, ..., 1) concentrates at 1 - 1/(6n) under the null;
    the statistic n (u1 . uhat - 1 + 1/(6n)) / sigma_tilde is asymptotically
    standard normal.
    """
    if n < 3:
        raise ValueError("the statistic needs n >= 3 (the scale is 0 at n=2)")
    vec = np.asarray(uhat, dtype=np.float64)
    if vec.shape != (n,):
        raise ValueError(f"expected a vector of shape ({n},), got {vec.shape}")
    if abs(np.linalg.norm(vec) - 1.0) > 1e-8:
        raise ValueError("uhat must be a unit vector (within 1e-8)")
    total = float(vec.sum())
    if total <= 0.0:
        raise ValueError("uhat must be sign-fixed: component sum > 0")
    overlap = total / math.sqrt(n)
    m = moments(n)
    return n * (overlap - 1.0 + 1.0 / (6.0 * n)) / m.sigma_tilde


@dataclass(frozen=True)
class TestResult:
    """Outcome of the eigenvalue test on one data matrix.

    ``u1_dot_uhat`` is the overlap of the leading eigenvector with the
    constant unit vector; near 1 under the null, visibly smaller under
    block structure.
    """

    __test__ = False  # not a test case, despite the name

    n: int
    lambda1: float
    t_stat: float
    p_value: float
    alpha: float
    reject: bool
    sigma_sq: float
    sigma_tilde: float
    centering: float
    u1_dot_uhat: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "lambda1": self.lambda1,
            "t_stat": self.t_stat,
            "p_value": self.p_value,
            "alpha": self.alpha,
            "reject": self.reject,
            "sigma_sq": self.sigma_sq,
            "sigma_tilde": self.sigma_tilde,
            "centering": self.centering,
            "u1_dot_uhat": self.u1_dot_uhat,
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def run_test(
    matrix: SymmetricMatrix,
    alpha: float = 0.05,
    policy: TiePolicy | None = None,
    alternative: str = "two-sided",
    tol: float = 1e-12,
    max_iter: int = 10_000,
) -> TestResult:
    """Rank-transform ``matrix`` and test for latent structure.

    Parameters
    ----------
    matrix : SymmetricMatrix
        Hollow symmetric data matrix, n >= 3.
    alpha : float
        Level in (0, 1); default 0.05.
    policy : TiePolicy, optional
        Tie handling for the rank transform; defaults to ``error``, the
        right choice for user data (simulation pipelines pass a seeded
        ``random`` policy).
    alternative : str
        ``two-sided`` (default) or ``greater``. Spiked alternatives push
        the statistic to the right, so ``greater`` buys power when a
        directional alternative is defensible.
    tol, max_iter : float, int
        Forwarded to :func:`leading_eigenpair`.

    Returns
    -------
    TestResult
        With ``reject == (p_value < alpha)``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if alternative not in _ALTERNATIVES:
        raise ValueError(f"alternative must be one of {_ALTERNATIVES}, got {alternative!r}")
    if matrix.n < 3:
        raise ValueError("the test needs n >= 3")
    ranked = rank_transform(matrix, policy)
    pair = leading_eigenpair(ranked, tol=tol, max_iter=max_iter)
    n = matrix.n
    m = moments(n)
    t_stat = (pair.value - m.centering) / m.sigma_tilde
    if alternative == "two-sided":
        p_value = 2.0 * (1.0 - std_normal_cdf(abs(t_stat)))
    else:
        p_value = 1.0 - std_normal_cdf(t_stat)
    overlap = float(pair.vector.sum()) / math.sqrt(n)
    return TestResult(
        n=n,
        lambda1=pair.value,
        t_stat=t_stat,
        p_value=p_value,
        alpha=alpha,
        reject=bool(p_value < alpha),
        sigma_sq=m.sigma_sq,
        sigma_tilde=m.sigma_tilde,
        centering=m.centering,
        u1_dot_uhat=overlap,
    )


@dataclass(frozen=True)
class SeparationEstimate:
    """Estimate of pr(X2 <= X1) for X1 ~ F1, X2 ~ F2 independent.

    ``method`` is ``closed-form`` (exact, Gaussian pair) or ``monte-carlo``
    (then ``samples``, ``seed`` and the binomial ``std_error`` are set).
    The value is 1/2 exactly when F1 == F2 is continuous; its distance from
    1/2 drives the power of the eigenvalue test under two-group structure.
    """

    value: float
    method: str
    samples: int | None = None
    seed: int | None = None
    std_error: float | None = None


def e1f2(
    f1: EntryDistribution | str,
    f2: EntryDistribution | str,
    method: str = "auto",
    samples: int = 1_000_000,
    seed: int | None = None,
) -> SeparationEstimate:
    """Separation functional pr(X2 <= X1) between two entry distributions.

    ``method="auto"`` uses the Gaussian closed form
    Phi((mu1 - mu2) / sqrt(sigma1^2 + sigma2^2)) when both distributions are
    normal and Monte Carlo otherwise; ``closed-form`` and ``monte-carlo``
    force the route. Monte Carlo requires an explicit ``seed`` and at least
    100 samples.
    """
    f1 = as_distribution(f1)
    f2 = as_distribution(f2)
    if method not in ("auto", "closed-form", "monte-carlo"):
        raise ValueError(f"unknown method {method!r}")
    gaussian = isinstance(f1, Normal) and isinstance(f2, Normal)
    if method == "closed-form" and not gaussian:
        raise ValueError("closed-form e1f2 is only available for a normal/normal pair")
    if method in ("auto", "closed-form") and gaussian:
        gap = (f1.mu - f2.mu) / math.hypot(f1.sigma, f2.sigma)
        return SeparationEstimate(value=std_normal_cdf(gap), method="closed-form")
    if samples < 100:
        raise ValueError(f"samples must be >= 100, got {samples}")
    if seed is None:
        raise ValueError("monte-carlo e1f2 requires a seed")
    rng = make_generator(seed)
    x1 = f1.sample(samples, rng)
    x2 = f2.sample(samples, rng)
    p = float(np.count_nonzero(x2 <= x1)) / samples
    return SeparationEstimate(
        value=p,
        method="monte-carlo",
        samples=samples,
        seed=seed,
        std_error=math.sqrt(max(p * (1.0 - p), 1e-300) / samples),
    )
