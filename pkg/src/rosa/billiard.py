"""Billiard words and the Planar Rosa candidate search.

The line through (1/2, ..., 1/2) with direction gamma, gamma_i = cos((2i+1) pi / 2n),
crosses the hyperplanes x_i = c + 1/2.  Writing down 2i+1 for each crossing of a
hyperplane of coordinate i gives the billiard word.  Palindromic candidates are
a prefix followed by its mirror image.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circulant import EigenReport, eigenvalues
from .edgeword import BalanceReport, CountingReport, Edgeword, abelianize, check_k1_counting, is_almost_balanced
from .errors import NotFound, ValidationError
from .lattice import check_n


def gamma_vector(n: int) -> np.ndarray:
    n = check_n(n)
    return np.cos((2 * np.arange(n // 2) + 1) * np.pi / (2 * n))


def billiard_letters(n: int, length: int) -> list[int]:
    """First ``length`` letters: the next letter is 2j+1 for j minimising (c_j + 1/2) / gamma_j.

    c_j counts letters 2j+1 already written; ties go to the smaller j.
    """
    g = gamma_vector(n)
    counts = np.zeros(len(g), dtype=np.int64)
    out = []
    for _ in range(length):
        j = int(np.argmin((counts + 0.5) / g))
        out.append(2 * j + 1)
        counts[j] += 1
    return out


def billiard_word(n: int, length: int) -> Edgeword:
    if length < 0:
        raise ValidationError("length must be non-negative")
    return Edgeword(n, tuple(billiard_letters(n, length)))


def sweep_letters(n: int, length: int) -> list[int]:
    """Same word from a sweep over crossing parameters (c + 1/2) / gamma_i."""
    g = gamma_vector(n)
    # every coordinate crosses at most length // share + 1 times among the first letters
    per = np.ceil(length * g / g.sum()).astype(int) + 2
    times, letters = [], []
    for i, gi in enumerate(g):
        c = np.arange(per[i])
        times.append((c + 0.5) / gi)
        letters.append(np.full(per[i], 2 * i + 1))
    t = np.concatenate(times)
    ell = np.concatenate(letters)
    order = np.lexsort((ell, t))
    return [int(x) for x in ell[order][:length]]


def billiard_path(n: int, length: int) -> np.ndarray:
    """Points p_0 = 0, p_{i+1} = p_i + e(letter i), shape (length + 1, n // 2)."""
    letters = billiard_letters(n, length)
    steps = np.zeros((length, n // 2), dtype=np.int64)
    steps[np.arange(length), (np.array(letters, dtype=np.int64) - 1) // 2] = 1
    return np.vstack([np.zeros((1, n // 2), dtype=np.int64), np.cumsum(steps, axis=0)])


def distance_to_gamma(p, n: int) -> float:
    """Euclidean distance from p to the line spanned by gamma."""
    g = gamma_vector(n)
    g = g / np.linalg.norm(g)
    p = np.asarray(p, dtype=float)
    along = float(p @ g)
    return math.sqrt(max(float(p @ p) - along * along, 0.0))


def tracking_distance(n: int, i: int) -> float:
    return distance_to_gamma(billiard_path(n, i)[i], n)


def candidate_edgeword(n: int, j: int) -> Edgeword:
    """pref_j(w) followed by its reverse."""
    if j < 1:
        raise ValidationError("prefix length must be positive")
    pref = billiard_letters(n, j)
    return Edgeword(n, tuple(pref + pref[::-1]))


@dataclass
class Candidate:
    j: int
    edgeword: Edgeword
    eigen: EigenReport
    counting: CountingReport
    balance: BalanceReport

    @property
    def ok(self) -> bool:
        return self.eigen.planar() and self.counting.ok and self.balance.ok


def evaluate_candidate(u: Edgeword, j: int | None = None) -> Candidate:
    eig = eigenvalues(u.n, abelianize(u))
    return Candidate(j if j is not None else len(u) // 2, u, eig, check_k1_counting(u), is_almost_balanced(u, 2))


def find_planar_candidate(n: int, j_max: int = 200) -> Candidate:
    """Smallest j <= j_max whose candidate is planar, corner-tileable and 2-almost-balanced."""
    n = check_n(n)
    pref = billiard_letters(n, j_max)
    for j in range(1, j_max + 1):
        u = Edgeword(n, tuple(pref[:j] + pref[:j][::-1]))
        eig = eigenvalues(n, abelianize(u))
        if not eig.planar():
            continue
        cand = Candidate(j, u, eig, check_k1_counting(u), is_almost_balanced(u, 2))
        if cand.ok:
            return cand
    raise NotFound(f"no planar candidate for n={n} with j <= {j_max}")
