"""Circulant expansion matrices and their spectra.

For an edgeword u over the odd letters 1, 3, ..., n-2, the expansion matrix is
M = sum_i [u]_i M_i(n), where [u]_i counts the letter 2i+1 and M_i(n) is the
circulant whose first column holds (-1)^i at row i*ceil(n/2) and (-1)^(i+1) at
row -(i+1)*ceil(n/2), both taken mod n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import circulant

from .lattice import check_n


def first_index(i: int, n: int) -> int:
    return (i * ((n + 1) // 2)) % n


def second_index(i: int, n: int) -> int:
    return (-(i + 1) * ((n + 1) // 2)) % n


def elementary_matrix(n: int, i: int) -> np.ndarray:
    n = check_n(n)
    if not 0 <= i < n // 2:
        raise ValueError(f"letter index must lie in [0, {n // 2}), got {i}")
    col = np.zeros(n, dtype=np.int64)
    col[first_index(i, n)] += (-1) ** i
    col[second_index(i, n)] += (-1) ** (i + 1)
    return circulant(col)


def _counts(abel, n: int) -> np.ndarray:
    counts = np.asarray(abel, dtype=np.int64).reshape(-1)
    if len(counts) != n // 2:
        raise ValueError(f"abelianization must have {n // 2} entries, got {len(counts)}")
    return counts


def expansion_matrix(n: int, abel) -> np.ndarray:
    """Integer matrix of the linear map induced on Z^n by an edgeword with letter counts ``abel``."""
    n = check_n(n)
    counts = _counts(abel, n)
    m = np.zeros((n, n), dtype=np.int64)
    for i, c in enumerate(counts):
        if c:
            m += int(c) * elementary_matrix(n, i)
    return m


def eigenvalue_matrix(n: int) -> np.ndarray:
    """Symmetric matrix with entries 2 cos((2i+1)(2j+1) pi / 2n)."""
    n = check_n(n)
    odd = 2 * np.arange(n // 2) + 1
    return 2 * np.cos(np.outer(odd, odd) * np.pi / (2 * n))


@dataclass(frozen=True)
class EigenReport:
    lambda_delta: complex
    lambdas: np.ndarray
    moduli: np.ndarray

    def expanding(self) -> bool:
        return bool(self.moduli[0] > 1)

    def planar(self) -> bool:
        """Expanding on the tiling plane and contracting on every other eigenplane."""
        return bool(self.moduli[0] > 1 and np.all(self.moduli[1:] < 1))


def eigenvalues(n: int, abel) -> EigenReport:
    """Eigenvalue of the expansion matrix on each eigenplane E_j and on the diagonal.

    E_j is spanned by (exp(2 i pi (2j+1) k / n))_k and carries
    lambda_j = (N [u])_j exp(-i (2j+1) pi / 2n).  The diagonal carries 0.
    """
    n = check_n(n)
    counts = _counts(abel, n).astype(float)
    real = eigenvalue_matrix(n) @ counts
    phase = np.exp(-1j * (2 * np.arange(n // 2) + 1) * np.pi / (2 * n))
    lambdas = real * phase
    return EigenReport(0j, lambdas, np.abs(real))


def eigenvector(n: int, j: int) -> np.ndarray:
    """Complex row vector w with w M = lambda_j w for every expansion matrix M."""
    k = np.arange(n)
    return np.exp(2j * np.pi * (2 * j + 1) * k / n)


def circulant_apply(row, x) -> np.ndarray:
    """Product of circ(row) with x, where row r of circ is the first row shifted right by r."""
    row = np.asarray(row)
    x = np.asarray(x)
    n = len(row)
    out = np.zeros(n, dtype=np.result_type(row, x))
    for r in range(n):
        out[r] = np.dot(np.roll(row, r), x)
    return out


def circ_from_row(row) -> np.ndarray:
    """Circulant with the given first row."""
    row = np.asarray(row)
    return circulant(np.roll(row[::-1], 1))

