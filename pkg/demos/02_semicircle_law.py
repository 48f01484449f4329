"""
The whitened rank matrix spectrum is a semicircle
=================================================

One realization is enough to see it. Center and scale the rank matrix,
divide the eigenvalues by sqrt(n), and the histogram fills the semicircle
on [-2, 2]; the largest eigenvalue hugs the edge at 2.
"""

import numpy as np

from rankspectral import (
    Uniform,
    full_spectrum,
    rank_transform,
    sample_homogeneous,
    semicircle_cdf,
    whiten,
)
from rankspectral.ranking import TiePolicy

n = 1200
matrix = sample_homogeneous(n, Uniform(0.0, 1.0), seed=42)
# ~7e5 float64 draws: collisions are vanishingly rare but cost nothing to allow
ranked = rank_transform(matrix, TiePolicy.random(43))

# whiten: subtract the (constant) entry mean, divide by the entry sd
white = whiten(ranked)
eigs = full_spectrum(white) / np.sqrt(n)
print(f"n = {n}: spectrum spans [{eigs[-1]:.3f}, {eigs[0]:.3f}]")
print(f"scaled operator norm {max(eigs[0], -eigs[-1]):.4f} (limit 2)")

# Text histogram against the semicircle density (2 pi)^-1 sqrt(4 - x^2).
edges = np.linspace(-2.2, 2.2, 23)
counts, _ = np.histogram(eigs, bins=edges)
emp = counts / counts.sum() / np.diff(edges)
width = 46
print()
print("  bin      empirical vs semicircle density")
for left, right, dens in zip(edges[:-1], edges[1:], emp):
    mid = 0.5 * (left + right)
    semi = np.sqrt(max(4.0 - mid * mid, 0.0)) / (2.0 * np.pi)
    bar = "#" * int(round(dens * width))
    dot = int(round(semi * width))
    line = list(bar.ljust(width))
    if 0 <= dot < width:
        line[dot] = "|"  # where the semicircle says the bar should end
    print(f"{mid:+.1f}  {''.join(line)}")

# Kolmogorov distance between the empirical spectral distribution and the
# semicircle CDF, evaluated at the eigenvalues themselves.
sorted_eigs = np.sort(eigs)
grid = np.arange(1, n + 1) / n
ks = np.max(
    np.maximum(
        np.abs(grid - semicircle_cdf(sorted_eigs)),
        np.abs(grid - 1.0 / n - semicircle_cdf(sorted_eigs)),
    )
)
print(f"\nKS distance to the semicircle: {ks:.4f} (shrinks like n^-1/2 or faster)")
