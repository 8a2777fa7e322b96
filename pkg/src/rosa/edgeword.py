"""Edgewords: palindromic words over the odd letters 1, 3, ..., n-2.

Letter t stands for a rhombus of angle t pi / n sitting with its diagonal on a
metatile edge.  Positions are 1-based in the counting functions, as in
f_j(x) = number of letters j among the first x letters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError
from .lattice import check_n

INF = math.inf


@dataclass(frozen=True)
class Edgeword:
    n: int
    letters: tuple[int, ...]

    def __post_init__(self):
        check_n(self.n)
        object.__setattr__(self, "letters", tuple(int(t) for t in self.letters))
        for t in self.letters:
            if t < 1 or t > self.n - 2 or t % 2 == 0:
                raise ValidationError(f"letter {t} is not an odd number in [1, {self.n - 2}]")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __str__(self) -> str:
        return format_edgeword(self)

    @property
    def alphabet(self) -> tuple[int, ...]:
        return tuple(range(1, self.n - 1, 2))

    def is_palindrome(self) -> bool:
        return self.letters == self.letters[::-1]

    def reversed(self) -> "Edgeword":
        return Edgeword(self.n, self.letters[::-1])

    def __add__(self, other: "Edgeword") -> "Edgeword":
        if other.n != self.n:
            raise ValidationError("cannot concatenate edgewords of different n")
        return Edgeword(self.n, self.letters + other.letters)


def parse_edgeword(text: str, n: int) -> Edgeword:
    """Read an edgeword; letters are bare digits for n <= 11 and dot-separated above."""
    n = check_n(n)
    text = text.strip()
    if not text:
        raise ValidationError("empty edgeword")
    try:
        if "." in text or n >= 13:
            letters = [int(t) for t in text.split(".")]
        else:
            letters = [int(c) for c in text]
    except ValueError as exc:
        raise ValidationError(f"malformed edgeword {text!r}") from exc
    return Edgeword(n, tuple(letters))


def format_edgeword(u: Edgeword) -> str:
    if u.n >= 13:
        return ".".join(str(t) for t in u.letters)
    return "".join(str(t) for t in u.letters)


def _sym_run(n: int) -> list[int]:
    """1, 3, 5, ..., n-2."""
    return list(range(1, n - 1, 2))


def subrosa_edgeword(n: int) -> Edgeword:
    """Sub Rosa edgeword.

    s(n) rev(s(3)) rev(s(5)) ... rev(s(n-2)) | s(n-2) ... s(5) s(3) rev(s(n))
    with s(m) = 1, 3, ..., m-2.
    """
    n = check_n(n)
    left = _sym_run(n)
    for m in range(3, n, 2):
        left += _sym_run(m)[::-1]
    right: list[int] = []
    for m in range(n - 2, 2, -2):
        right += _sym_run(m)
    right += _sym_run(n)[::-1]
    return Edgeword(n, tuple(left + right))


def abelianize(u: Edgeword) -> np.ndarray:
    """Letter counts [u]_i for letters 2i+1, i < n // 2."""
    counts = np.zeros(u.n // 2, dtype=np.int64)
    for t in u.letters:
        counts[(t - 1) // 2] += 1
    return counts


def _check_letter_index(u: Edgeword, j: int) -> None:
    if j % 2 == 0 or j < 1 or j >= 2 * u.n:
        raise ValidationError(f"counting index must be odd in [1, 2n), got {j}")


def counting(u: Edgeword, j: int, x: int) -> int:
    """f_j(x): occurrences of j in the prefix of length x.

    Extended by f_n = 0 and f_j = -f_{2n-j} for n < j < 2n.
    """
    _check_letter_index(u, j)
    if not 0 <= x <= len(u):
        raise ValidationError(f"prefix length {x} outside [0, {len(u)}]")
    if j == u.n:
        return 0
    if j > u.n:
        return -counting(u, 2 * u.n - j, x)
    return sum(1 for t in u.letters[:x] if t == j)


def counting_inverse(u: Edgeword, j: int, y: int) -> float:
    """Shortest prefix length containing y letters j.

    0 for y = 0, -inf for y < 0 and +inf when the word holds fewer than y letters j.
    Defined only for letters j <= n - 2.
    """
    if j % 2 == 0 or j < 1 or j > u.n - 2:
        raise ValidationError(f"inverse counting is defined for letters 1..{u.n - 2}, got {j}")
    if y < 0:
        return -INF
    if y == 0:
        return 0
    seen = 0
    for pos, t in enumerate(u.letters, start=1):
        if t == j:
            seen += 1
            if seen == y:
                return pos
    return INF


class _Counter:
    """Prefix count tables for fast repeated evaluation."""

    def __init__(self, u: Edgeword):
        self.u = u
        self.n = u.n
        m = len(u)
        self.prefix = {}
        self.positions = {}
        for j in u.alphabet:
            ind = np.fromiter((t == j for t in u.letters), dtype=np.int64, count=m)
            self.prefix[j] = np.concatenate([[0], np.cumsum(ind)])
            self.positions[j] = np.nonzero(ind)[0] + 1

    def f(self, j: int, x: int) -> int:
        if j == self.n:
            return 0
        if j > self.n:
            return -self.f(2 * self.n - j, x)
        return int(self.prefix[j][x])

    def finv(self, j: int, y: int) -> float:
        if y < 0:
            return -INF
        if y == 0:
            return 0
        pos = self.positions[j]
        return int(pos[y - 1]) if y <= len(pos) else INF


def _less(a: float, b: float) -> bool:
    """Strict inequality where two +inf sentinels count as satisfied."""
    if a == INF and b == INF:
        return True
    return a < b


@dataclass
class BalanceReport:
    ok: bool
    k: int
    witness: tuple[int, int] | None = None  # half-open factor [start, end)
    letters: tuple[int, int] | None = None  # (j1, j2) with |v|_j1 - |v|_j2 < -k

    def factor(self, u: Edgeword) -> Edgeword | None:
        if self.witness is None:
            return None
        return Edgeword(u.n, u.letters[self.witness[0] : self.witness[1]])


def is_almost_balanced(u: Edgeword, k: int) -> BalanceReport:
    """Check |v|_j1 - |v|_j2 >= -k for every factor v and every j1 < j2.

    For each letter pair a maximum-sum factor of the +-1 indicator sequence
    gives the worst factor directly.
    """
    alphabet = u.alphabet
    L = len(u)
    worst = None
    for a_i, j1 in enumerate(alphabet):
        for j2 in alphabet[a_i + 1 :]:
            best, best_span = 0, None
            run, run_start = 0, 0
            for pos, t in enumerate(u.letters):
                s = (t == j2) - (t == j1)
                if run <= 0:
                    run, run_start = s, pos
                else:
                    run += s
                if run > best:
                    best, best_span = run, (run_start, pos + 1)
            if best > k and (worst is None or best > worst[0]):
                worst = (best, best_span, (j1, j2))
    if worst is None:
        return BalanceReport(True, k)
    return BalanceReport(False, k, worst[1], worst[2])


@dataclass
class CountingViolation:
    family: str
    j1: int
    j2: int
    position: int
    lhs: float
    rhs: float


@dataclass
class CountingReport:
    ok: bool
    violations: list[CountingViolation] = field(default_factory=list)
    balance: BalanceReport | None = None

    @property
    def first(self) -> CountingViolation | None:
        return self.violations[0] if self.violations else None


def _pairs(u: Edgeword):
    alphabet = u.alphabet
    for a_i, j1 in enumerate(alphabet):
        for j2 in alphabet[a_i + 1 :]:
            yield j1, j2


def _adjacent(c: _Counter, u: Edgeword, corner: int, family: str, stop: bool) -> list[CountingViolation]:
    out = []
    n = u.n
    for j1, j2 in _pairs(u):
        t1, t2 = abs(j1 - 2 * corner), abs(j2 - 2 * corner)
        if t1 > n - 2 or t2 > n - 2:
            # no rhombus of that angle exists; the chain cannot end on the adjacent side
            continue
        for k1 in c.positions[j1].tolist():
            lhs = c.finv(t2, c.f(j2, k1))
            rhs = c.finv(t1, c.f(j1, k1))
            if not _less(lhs, rhs):
                out.append(CountingViolation(family, j1, j2, k1, lhs, rhs))
                if stop:
                    return out
    return out


def _opposite(c: _Counter, u: Edgeword, corner: int, family: str, stop: bool) -> list[CountingViolation]:
    out = []
    m = len(u)
    for j1, j2 in _pairs(u):
        s1 = c.f(abs(j1 - 2 * corner), m)
        s2 = c.f(abs(j2 - 2 * corner), m)
        for k1 in c.positions[j1].tolist():
            if c.f(j1, k1) <= s1:
                continue
            lhs = c.finv(j2, c.f(j2, k1) - s2)
            rhs = c.finv(j1, c.f(j1, k1) - s1)
            if not _less(lhs, rhs):
                out.append(CountingViolation(family, j1, j2, k1, lhs, rhs))
                if stop:
                    return out
    return out


def check_k1_counting(u: Edgeword, stop_at_first: bool = True) -> CountingReport:
    """Corner condition at the narrow angle together with 2-almost-balance.

    Both together are sufficient for every metatile of u to be tileable.
    """
    c = _Counter(u)
    violations = _adjacent(c, u, 1, "adjacent-narrow", stop_at_first)
    balance = is_almost_balanced(u, 2)
    return CountingReport(not violations and balance.ok, violations, balance)


def derived_counting_conditions(u: Edgeword, k: int, stop_at_first: bool = False) -> CountingReport:
    """The four chain-counting inequalities for the metatile with angles k pi/n and (n-k) pi/n.

    The opposite-side inequalities only apply when f_j1(k1) > f_{|j1-2c|}(m).
    Adjacent-side inequalities whose inverse counting index exceeds n-2 are void.
    """
    n = u.n
    if not 1 <= k < n:
        raise ValidationError(f"corner index must lie in [1, n), got {k}")
    c = _Counter(u)
    v: list[CountingViolation] = []
    for corner, tag in ((k, "1"), (n - k, "2")):
        v += _adjacent(c, u, corner, "adjacent" + tag, stop_at_first and bool(v))
        v += _opposite(c, u, corner, "opposite" + tag, stop_at_first and bool(v))
    return CountingReport(not v, v)


def random_palindrome(n: int, half_length: int, rng: np.random.Generator) -> Edgeword:
    half = rng.choice(np.arange(1, n - 1, 2), size=half_length)
    return Edgeword(n, tuple(int(t) for t in np.concatenate([half, half[::-1]])))
