"""Hollow symmetric matrices in packed upper-triangle storage.

An n x n symmetric matrix with zero diagonal is stored as the vector of its
N = n(n-1)/2 strict upper-triangle entries in lexicographic (row-major) pair
order, the same order as ``np.triu_indices(n, 1)``. All other modules build
on this representation; dense form is materialized only where LAPACK needs
it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterator

import numpy as np

FORMATS = ("dense-csv", "upper-triangle-text", "weighted-edge-list")

_SYMMETRY_RTOL = 1e-9


class FormatError(ValueError):
    """Malformed matrix input (shape, tokens, pair coverage)."""


class AsymmetryError(FormatError):
    """Dense input violates the symmetry tolerance."""


def pack_index(i: int, j: int, n: int) -> int:
    """Map the pair (i, j), i < j, to its packed position.

    Parameters
    ----------
    i, j : int
        Zero-based indices with 0 <= i < j < n.
    n : int
        Matrix dimension.

    Returns
    -------
    int
        Position k in [0, n(n-1)/2) such that pair (i, j) is the k-th strict
        upper-triangle entry in row-major order.
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got n={n}")
    if not (0 <= i < j < n):
        raise ValueError(f"need 0 <= i < j < n, got i={i}, j={j}, n={n}")
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


def unpack_index(k: int, n: int) -> tuple[int, int]:
    """Inverse of :func:`pack_index`: recover (i, j) from position k."""
    n_pairs = n * (n - 1) // 2
    if not (0 <= k < n_pairs):
        raise ValueError(f"position must be in [0, {n_pairs}), got {k}")
    # Largest i with i(2n-i-1)/2 <= k; integer sqrt keeps this exact.
    i = (2 * n - 1 - math.isqrt((2 * n - 1) ** 2 - 8 * k)) // 2
    while i * (2 * n - i - 1) // 2 > k:
        i -= 1
    while (i + 1) * (2 * n - i - 2) // 2 <= k:
        i += 1
    j = k - i * (2 * n - i - 1) // 2 + i + 1
    return i, j


def pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column index arrays of the strict upper triangle, pack order."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got n={n}")
    return np.triu_indices(n, k=1)


class SymmetricMatrix:
    """Symmetric matrix with zero diagonal, packed storage.

    Parameters
    ----------
    n : int
        Dimension, >= 2.
    values : array_like
        The n(n-1)/2 strict upper-triangle entries in pack order. Must be
        finite. Stored as float64; the array is copied and made read-only.
    """

    def __init__(self, n: int, values: np.ndarray) -> None:
        if n < 2:
            raise ValueError(f"dimension must be >= 2, got n={n}")
        vals = np.array(values, dtype=np.float64)
        if vals.ndim != 1 or vals.shape[0] != n * (n - 1) // 2:
            raise ValueError(
                f"expected {n * (n - 1) // 2} packed values for n={n}, "
                f"got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("matrix entries must be finite")
        vals.flags.writeable = False
        self.n = n
        self.values = vals

    @property
    def n_pairs(self) -> int:
        """Number of stored entries, n(n-1)/2."""
        return self.values.shape[0]

    @classmethod
    def from_dense(cls, array: np.ndarray, rtol: float = _SYMMETRY_RTOL) -> "SymmetricMatrix":
        """Build from a dense square array.

        The array must be symmetric within ``|A_ij - A_ji| <= rtol *
        max(1, |A_ij|)`` entrywise; the two triangles are averaged and the
        diagonal is discarded.
        """
        arr = np.asarray(array, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise FormatError(f"expected a square array, got shape {arr.shape}")
        n = arr.shape[0]
        if n < 2:
            raise FormatError(f"dimension must be >= 2, got n={n}")
        gap = np.abs(arr - arr.T)
        bound = rtol * np.maximum(1.0, np.abs(arr))
        if np.any(gap > bound):
            i, j = np.unravel_index(int(np.argmax(gap - bound)), arr.shape)
            raise AsymmetryError(
                f"entries ({i},{j}) and ({j},{i}) differ by {gap[i, j]:.3e}, "
                f"beyond tolerance {bound[i, j]:.3e}"
            )
        iu = pair_indices(n)
        upper = arr[iu]
        lower = arr.T[iu]
        # Pass exactly symmetric entries through untouched so saving and
        # reloading is bit-exact; halve before adding to avoid overflow.
        values = np.where(upper == lower, upper, 0.5 * upper + 0.5 * lower)
        return cls(n, values)

    def entry(self, i: int, j: int) -> float:
        """Entry (i, j); zero on the diagonal."""
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise ValueError(f"indices out of range for n={self.n}: ({i}, {j})")
        if i == j:
            return 0.0
        if i > j:
            i, j = j, i
        return float(self.values[pack_index(i, j, self.n)])

    def dense(self) -> np.ndarray:
        """Materialize the full n x n array."""
        out = np.zeros((self.n, self.n))
        iu = pair_indices(self.n)
        out[iu] = self.values
        out[iu[1], iu[0]] = self.values
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymmetricMatrix):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"SymmetricMatrix(n={self.n})"


def expectation_matrix(n: int) -> SymmetricMatrix:
    """The matrix with every off-diagonal entry 1/2.

    Its eigenvalues are (n-1)/2 with eigenvector 1/sqrt(n) and -1/2 with
    multiplicity n-1.
    """
    return SymmetricMatrix(n, np.full(n * (n - 1) // 2, 0.5))


def permute_nodes(matrix: SymmetricMatrix, perm: np.ndarray) -> SymmetricMatrix:
    """Relabel nodes: result entry (i, j) equals input entry (perm[i], perm[j])."""
    n = matrix.n
    p = np.asarray(perm)
    if p.shape != (n,) or not np.array_equal(np.sort(p), np.arange(n)):
        raise ValueError(f"perm must be a permutation of range({n})")
    rows, cols = pair_indices(n)
    pi = p[rows]
    pj = p[cols]
    lo = np.minimum(pi, pj)
    hi = np.maximum(pi, pj)
    k = lo * (2 * n - lo - 1) // 2 + (hi - lo - 1)
    return SymmetricMatrix(n, matrix.values[k])


@dataclass(frozen=True)
class MatrixSource:
    """Where and how to read a matrix.

    Exactly one of ``path`` or ``stream`` must be set; ``format`` is one of
    ``dense-csv``, ``upper-triangle-text``, ``weighted-edge-list``.
    """

    format: str
    path: str | Path | None = None
    stream: IO[str] | None = None

    def __post_init__(self) -> None:
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}; expected one of {FORMATS}")
        if (self.path is None) == (self.stream is None):
            raise ValueError("exactly one of path or stream must be given")


def load_matrix(source: MatrixSource | str | Path, format: str = "dense-csv") -> SymmetricMatrix:
    """Read a :class:`SymmetricMatrix` from a file or stream.

    Parameters
    ----------
    source : MatrixSource or path
        A :class:`MatrixSource`, or a bare path (then ``format`` applies).
    format : str
        Format for bare-path callers; ignored when a MatrixSource is given.

    Raises
    ------
    FormatError
        Malformed input: wrong shape or token count, non-numeric tokens,
        duplicate edge-list pairs with conflicting weights, missing pairs.
    AsymmetryError
        Dense input asymmetric beyond ``1e-9 * max(1, |entry|)``.
    FileNotFoundError
        Path source does not exist.
    """
    if not isinstance(source, MatrixSource):
        source = MatrixSource(format=format, path=source)
    if source.path is not None:
        with open(source.path, "r", encoding="utf-8") as fh:
            return _parse(source.format, fh)
    assert source.stream is not None
    return _parse(source.format, source.stream)


def save_matrix(
    matrix: SymmetricMatrix,
    target: str | Path | IO[str],
    format: str = "dense-csv",
) -> None:
    """Write a matrix in one of the supported formats.

    Values are emitted with shortest round-trip float repr, so
    ``load_matrix(save_matrix(M)) == M`` bit-exactly.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    if hasattr(target, "write"):
        _emit(matrix, target, format)  # type: ignore[arg-type]
    else:
        with open(target, "w", encoding="utf-8") as fh:
            _emit(matrix, fh, format)


def _emit(matrix: SymmetricMatrix, fh: IO[str], format: str) -> None:
    if format == "dense-csv":
        for row in matrix.dense():
            fh.write(",".join(repr(float(x)) for x in row))
            fh.write("\n")
    elif format == "upper-triangle-text":
        fh.write(f"{matrix.n}\n")
        for v in matrix.values:
            fh.write(repr(float(v)))
            fh.write("\n")
    else:
        rows, cols = pair_indices(matrix.n)
        for i, j, v in zip(rows, cols, matrix.values):
            fh.write(f"{i} {j} {repr(float(v))}\n")


def _parse(format: str, fh: IO[str]) -> SymmetricMatrix:
    if format == "dense-csv":
        return _parse_dense_csv(fh)
    if format == "upper-triangle-text":
        return _parse_upper_triangle(fh)
    return _parse_edge_list(fh)


def _numbered_lines(fh: IO[str]) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(fh, start=1):
        line = raw.strip()
        if line:
            yield lineno, line


def _parse_float(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise FormatError(f"line {lineno}: non-numeric value {token!r}") from None
    if not math.isfinite(value):
        raise FormatError(f"line {lineno}: non-finite value {token!r}")
    return value


def _parse_dense_csv(fh: IO[str]) -> SymmetricMatrix:
    rows: list[list[float]] = []
    width = None
    for lineno, line in _numbered_lines(fh):
        fields = [_parse_float(tok.strip(), lineno) for tok in line.split(",")]
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise FormatError(
                f"line {lineno}: expected {width} columns, got {len(fields)}"
            )
        rows.append(fields)
    if not rows:
        raise FormatError("empty input")
    if len(rows) != width:
        raise FormatError(f"expected a square matrix, got {len(rows)} rows x {width} columns")
    return SymmetricMatrix.from_dense(np.array(rows))


def _parse_upper_triangle(fh: IO[str]) -> SymmetricMatrix:
    n = None
    values: list[float] = []
    expected = None
    for lineno, line in _numbered_lines(fh):
        for token in line.split():
            if n is None:
                try:
                    n = int(token)
                except ValueError:
                    raise FormatError(
                        f"line {lineno}: expected dimension, got {token!r}"
                    ) from None
                if n < 2:
                    raise FormatError(f"line {lineno}: dimension must be >= 2, got {n}")
                expected = n * (n - 1) // 2
                continue
            if expected is not None and len(values) >= expected:
                raise FormatError(f"line {lineno}: more than {expected} values for n={n}")
            values.append(_parse_float(token, lineno))
    if n is None:
        raise FormatError("empty input")
    assert expected is not None
    if len(values) != expected:
        raise FormatError(f"expected {expected} values for n={n}, got {len(values)}")
    return SymmetricMatrix(n, np.array(values))


def _parse_edge_list(fh: IO[str]) -> SymmetricMatrix:
    weights: dict[tuple[int, int], float] = {}
    max_index = -1
    for lineno, line in _numbered_lines(fh):
        fields = line.split()
        if len(fields) != 3:
            raise FormatError(f"line {lineno}: expected 'i j w', got {line!r}")
        try:
            i, j = int(fields[0]), int(fields[1])
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer node index in {line!r}") from None
        if i < 0 or j < 0:
            raise FormatError(f"line {lineno}: negative node index in {line!r}")
        w = _parse_float(fields[2], lineno)
        max_index = max(max_index, i, j)
        if i == j:
            continue  # self-weights carry no information here
        key = (min(i, j), max(i, j))
        if key in weights and weights[key] != w:
            raise FormatError(
                f"line {lineno}: pair {key} repeated with conflicting weights "
                f"{weights[key]!r} and {w!r}"
            )
        weights[key] = w
    if max_index < 1:
        raise FormatError("empty input" if max_index < 0 else "need at least two nodes")
    n = max_index + 1
    expected = n * (n - 1) // 2
    if len(weights) != expected:
        raise FormatError(
            f"incomplete edge list: {len(weights)} distinct pairs, "
            f"expected {expected} for n={n}"
        )
    values = np.empty(expected)
    for (i, j), w in weights.items():
        values[pack_index(i, j, n)] = w
    return SymmetricMatrix(n, values)
