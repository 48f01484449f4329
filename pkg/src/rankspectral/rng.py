"""Deterministic random streams for simulation pipelines.

Every stochastic routine in this package draws from a numpy Generator backed
by the Philox counter-based bit generator, keyed by a 64-bit seed. Replicate
streams are derived from a master seed with a splitmix64-style mix so that
stream i is the same no matter which thread runs it or in what order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(value: int) -> int:
    """One splitmix64 finalizer round (Steele et al.), mod 2**64."""
    z = (value + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """Derive the seed for stream ``index`` from a master seed.

    Uses the splitmix64 stream construction: mix(mix(master) + index * gamma)
    with the golden-ratio gamma, so distinct indices give decorrelated keys
    and the map is O(1) in ``index``.

    Parameters
    ----------
    master_seed : int
        Any Python int; reduced mod 2**64.
    index : int
        Stream index, >= 0.

    Returns
    -------
    int
        A 64-bit seed.
    """
    if index < 0:
        raise ValueError(f"stream index must be >= 0, got {index}")
    base = splitmix64(master_seed & _MASK64)
    return splitmix64((base + index * _GOLDEN) & _MASK64)


def make_generator(seed: int) -> np.random.Generator:
    """Return a Philox-backed Generator keyed by ``seed``."""
    return np.random.Generator(np.random.Philox(key=seed & _MASK64))
