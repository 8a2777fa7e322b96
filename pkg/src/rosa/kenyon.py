"""Kenyon matchings, metatile interiors and constructive rhombus tiling of polygons.

A polygon is tileable by unit rhombi iff its edges admit a perfect matching
(K1) of parallel, oppositely oriented edges whose same-type pairs do not
cross (K2), whose paired edges face each other (K3), and whose crossing
pairs cross in the positive direction (K4).  Each matched pair is the
two ends of a chain of tiles sharing that edge type.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .circulant import expansion_matrix
from .edgeword import Edgeword, abelianize
from .errors import BudgetExceeded, ValidationError
from .lattice import (
    Patch,
    PolygonBoundary,
    Tile,
    direction_step,
    direction_vector,
    step_vector,
    tile_from_edges,
)

TOL = 1e-9
DEFAULT_BUDGET = 2_000_000


def _plane(m: np.ndarray, n: int) -> np.ndarray:
    return np.exp(1j * np.pi * (np.asarray(m) % (2 * n)) / n)


def _types_signs(edges: Sequence[int], n: int) -> tuple[np.ndarray, np.ndarray]:
    e = np.asarray(edges, dtype=np.int64) % (2 * n)
    even = e % 2 == 0
    types = np.where(even, e // 2, ((e - n) // 2) % n)
    signs = np.where(even, 1, -1)
    return types, signs


@dataclass
class Matching:
    partner: np.ndarray
    contiguous: bool

    def pairs(self) -> list[tuple[int, int]]:
        return [(a, int(b)) for a, b in enumerate(self.partner) if a < b]


def _paren_match(seq_pos: list[int], seq_sign: list[int]) -> list[tuple[int, int]] | None:
    """Non-crossing +/- matching of a cyclic sequence, opening at + signs."""
    L = len(seq_pos)
    if sum(seq_sign) != 0:
        return None
    prefix = np.cumsum(seq_sign)
    s = (int(np.argmin(prefix)) + 1) % L
    stack, out = [], []
    for t in range(L):
        i = (s + t) % L
        if seq_sign[i] > 0:
            stack.append(seq_pos[i])
        else:
            out.append((stack.pop(), seq_pos[i]))
    return out


def _is_contiguous(signs: list[int]) -> bool:
    changes = sum(1 for i in range(len(signs)) if signs[i] != signs[i - 1])
    return changes <= 2


def unique_matching(b: PolygonBoundary) -> Matching:
    """The matching pairing the i-th +v_k of its run with the i-th last -v_k.

    It is the only one satisfying K1 and K2 when, for every type, the +v_k and
    -v_k edges form two contiguous runs.  Otherwise the same nesting rule is
    applied and the result is flagged as non-contiguous.
    """
    n = b.n
    E = len(b)
    types, signs = _types_signs(b.edges, n)
    partner = np.full(E, -1, dtype=np.int64)
    contiguous = True
    for t in range(n):
        pos = np.nonzero(types == t)[0].tolist()
        if not pos:
            continue
        sg = signs[pos].tolist()
        pairs = _paren_match(pos, sg)
        if pairs is None:
            raise ValidationError(f"edge type {t} has unequal numbers of + and - edges")
        contiguous &= _is_contiguous(sg)
        for a, c in pairs:
            partner[a] = c
            partner[c] = a
    return Matching(partner, contiguous)


def _noncrossing_matchings(pos: list[int], sg: list[int]) -> Iterator[list[tuple[int, int]]]:
    if not pos:
        yield []
        return
    first = 0
    for t in range(1, len(pos), 2):
        if sg[t] != sg[first]:
            for inner in _noncrossing_matchings(pos[1:t], sg[1:t]):
                for outer in _noncrossing_matchings(pos[t + 1 :], sg[t + 1 :]):
                    yield [(pos[first], pos[t])] + inner + outer


def all_matchings(b: PolygonBoundary, limit: int = 10_000) -> Iterator[Matching]:
    """Every matching satisfying K1 and K2."""
    n = b.n
    E = len(b)
    types, signs = _types_signs(b.edges, n)
    per_type = []
    contiguous = True
    for t in range(n):
        pos = np.nonzero(types == t)[0].tolist()
        if not pos:
            continue
        sg = signs[pos].tolist()
        if sum(sg) != 0:
            return
        contiguous &= _is_contiguous(sg)
        per_type.append(list(itertools.islice(_noncrossing_matchings(pos, sg), limit)))
    for count, combo in enumerate(itertools.product(*per_type)):
        if count >= limit:
            raise BudgetExceeded(f"more than {limit} candidate matchings")
        partner = np.full(E, -1, dtype=np.int64)
        for pairs in combo:
            for a, c in pairs:
                partner[a] = c
                partner[c] = a
        yield Matching(partner, contiguous)


@dataclass
class MatchingReport:
    ok: bool
    violations: list[tuple[str, int, int]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def verify_matching(b: PolygonBoundary, m: Matching, max_report: int = 20) -> MatchingReport:
    """Check K1 to K4 for a matching; violations are (condition, edge, edge)."""
    n = b.n
    E = len(b)
    P = np.asarray(m.partner)
    out: list[tuple[str, int, int]] = []
    if E == 0:
        return MatchingReport(True)
    if np.any(P < 0) or np.any(P[P] != np.arange(E)) or np.any(P == np.arange(E)):
        return MatchingReport(False, [("K1", -1, -1)])
    types, signs = _types_signs(b.edges, n)
    for a in np.nonzero((types != types[P]) | (signs == signs[P]))[0][:max_report].tolist():
        out.append(("K1", a, int(P[a])))
    pts = b.points()
    mid = (pts[:-1] + pts[1:]) / 2
    d = _plane(np.array(b.edges), n)
    perp = 1j * d
    disp = mid[P] - mid
    k3 = (np.conj(perp) * disp).real <= TOL
    for a in np.nonzero(k3)[0][:max_report].tolist():
        out.append(("K3", a, int(P[a])))
    idx = np.arange(E)
    ob = (idx[None, :] - idx[:, None]) % E
    oa2 = ((P - idx) % E)[:, None]
    ob2 = (P[None, :] - idx[:, None]) % E
    inter = (ob < oa2) & (oa2 < ob2)
    same = types[:, None] == types[None, :]
    k2 = inter & same
    for a, c in np.argwhere(k2)[:max_report].tolist():
        out.append(("K2", a, c))
    cross = (np.conj(d)[:, None] * d[None, :]).imag
    k4 = inter & ~same & (cross <= TOL)
    for a, c in np.argwhere(k4)[:max_report].tolist():
        out.append(("K4", a, c))
    return MatchingReport(not out, out)


# --- metatile geometry -----------------------------------------------------


def prototile_edges(j: int, k: int, n: int) -> list[int]:
    """Counterclockwise edge directions of tile (0, j, k), starting at the anchor."""
    if 2 * (k - j) < n:
        return [2 * j, 2 * k, 2 * j + n, 2 * k + n]
    return [2 * k, 2 * j, 2 * k + n, 2 * j + n]


def letter_steps(m: int, t: int, n: int) -> tuple[int, int]:
    """Inner-side steps of letter t laid along the image of an edge of direction m.

    The rhombus of angle t pi/n has its diagonal along the image edge; its inner
    side consists of directions m + i and m - i - 1 with t = 2i + 1.
    """
    i = (t - 1) // 2
    return (m + i) % (2 * n), (m - i - 1) % (2 * n)


def metatile_corners(u: Edgeword, j: int, k: int) -> np.ndarray:
    """Images of the prototile corners under the expansion, counterclockwise."""
    n = u.n
    M = expansion_matrix(n, abelianize(u))
    corners = [np.zeros(n, dtype=np.int64)]
    for m in prototile_edges(j, k, n)[:3]:
        corners.append(corners[-1] + step_vector(m, n))
    return np.array([M @ c for c in corners])


def necklace_tiles(u: Edgeword, j: int, k: int) -> list[Tile]:
    """Rhombi of the four image edges; each is shared with the neighbouring metatile."""
    n = u.n
    corners = metatile_corners(u, j, k)
    tiles = []
    for c, m in zip(corners, prototile_edges(j, k, n)):
        pos = c.copy()
        for t in u.letters:
            a, b = letter_steps(m, t, n)
            tiles.append(tile_from_edges(pos, a, b, n))
            pos = pos + step_vector(a, n) + step_vector(b, n)
    return tiles


def _cancel(verts: list[np.ndarray], dirs: list[int], n: int) -> tuple[list[np.ndarray], list[int]]:
    """Remove back-and-forth pairs from a closed path, including across the wrap."""
    sv: list[np.ndarray] = []
    sd: list[int] = []
    for v, d in zip(verts, dirs):
        if sd and (sd[-1] - d) % (2 * n) == n:
            sv.pop()
            sd.pop()
        else:
            sv.append(v)
            sd.append(d)
    lo, hi = 0, len(sd) - 1
    while lo < hi and (sd[hi] - sd[lo]) % (2 * n) == n:
        lo += 1
        hi -= 1
    return sv[lo : hi + 1], sd[lo : hi + 1]


def metatile_polygon(u: Edgeword, j: int, k: int) -> PolygonBoundary:
    """Boundary of the metatile interior left after removing the necklaces."""
    n = u.n
    if not u.is_palindrome():
        raise ValidationError("metatiles need a palindromic edgeword")
    corners = metatile_corners(u, j, k)
    verts: list[np.ndarray] = []
    dirs: list[int] = []
    for c, m in zip(corners, prototile_edges(j, k, n)):
        pos = c.copy()
        for t in u.letters:
            for s in letter_steps(m, t, n):
                verts.append(pos)
                dirs.append(s)
                pos = pos + step_vector(s, n)
    verts, dirs = _cancel(verts, dirs, n)
    if not dirs:
        return PolygonBoundary(n, (), tuple(int(x) for x in corners[0]))
    return PolygonBoundary(n, tuple(dirs), tuple(int(x) for x in verts[0]))


# --- tiling ----------------------------------------------------------------


@dataclass
class TilingOutcome:
    tileable: bool
    patch: Patch | None = None
    report: MatchingReport | None = None
    method: str = ""
    nodes: int = 0


class _Boundary:
    """Mutable cyclic boundary with chain partners and vertex positions."""

    def __init__(self, b: PolygonBoundary, partner: np.ndarray):
        self.n = b.n
        self.W = list(b.edges)
        self.P = [int(x) for x in partner]
        self.V = [tuple(int(c) for c in v) for v in b.vertices()[:-1]]
        self.steps = [step_vector(m, self.n) for m in range(2 * self.n)]

    def __len__(self) -> int:
        return len(self.W)

    def state(self) -> tuple:
        return (tuple(self.W), self.V[0] if self.V else ())

    def convex(self, p: int) -> bool:
        q = (p + 1) % len(self.W)
        return 0 < (self.W[q] - self.W[p]) % (2 * self.n) < self.n

    def crossing(self, p: int) -> bool:
        E = len(self.W)
        q = (p + 1) % E
        da = (self.P[p] - p) % E
        db = (self.P[q] - p) % E
        return 1 < da < db

    def valid(self, p: int) -> bool:
        return self.convex(p) and self.crossing(p)

    def place(self, p: int) -> Tile:
        """Put a tile in the corner between edges p and p+1 and swap them."""
        W, P, V = self.W, self.P, self.V
        q = (p + 1) % len(W)
        a, b = W[p], W[q]
        tile = tile_from_edges(V[p], a, b, self.n)
        W[p], W[q] = b, a
        pa, pb = P[p], P[q]
        P[p], P[q] = pb, pa
        P[pb] = p
        P[pa] = q
        V[q] = tuple(int(x) for x in np.asarray(V[p]) + self.steps[b])
        return tile

    def unplace(self, p: int) -> None:
        # swapping back restores the corner: same operation on the swapped edges
        W, P, V = self.W, self.P, self.V
        q = (p + 1) % len(W)
        a, b = W[p], W[q]
        W[p], W[q] = b, a
        pa, pb = P[p], P[q]
        P[p], P[q] = pb, pa
        P[pb] = p
        P[pa] = q
        V[q] = tuple(int(x) for x in np.asarray(V[p]) + self.steps[b])

    def cancel_ends(self) -> bool:
        """Drop one adjacent pair of edges that are the two ends of a chain."""
        E = len(self.W)
        for p in range(E):
            q = (p + 1) % E
            if self.P[p] == q:
                keep = [i for i in range(E) if i != p and i != q]
                remap = {old: new for new, old in enumerate(keep)}
                self.W = [self.W[i] for i in keep]
                self.V = [self.V[i] for i in keep]
                self.P = [remap[self.P[i]] for i in keep]
                return True
        return False


def _symmetric(b: PolygonBoundary) -> bool:
    E = len(b)
    if E % 2:
        return False
    h = E // 2
    return all((b.edges[i] - b.edges[i + h]) % (2 * b.n) == b.n for i in range(h))


def _greedy(b: PolygonBoundary, m: Matching, symmetric: bool, budget: int) -> tuple[list[Tile], bool, int]:
    """Chain-guided ear placement; returns (tiles, finished, steps)."""
    st = _Boundary(b, m.partner)
    tiles: list[Tile] = []
    steps = 0
    hint = 0
    while len(st):
        if st.cancel_ends():
            hint = 0
            continue
        E = len(st)
        placed = False
        for off in range(E):
            p = (hint + off) % E
            if not st.valid(p):
                continue
            if symmetric and E > 4:
                p2 = (p + E // 2) % E
                if {p, (p + 1) % E} & {p2, (p2 + 1) % E}:
                    continue
                t1 = st.place(p)
                if not st.valid(p2):
                    st.unplace(p)
                    continue
                tiles += [t1, st.place(p2)]
            else:
                tiles.append(st.place(p))
            steps += 1
            if steps > budget:
                raise BudgetExceeded(f"tiling exceeded budget of {budget} placements")
            hint = max(p - 2, 0)
            placed = True
            break
        if not placed:
            return tiles, False, steps
    return tiles, True, steps


def _backtrack(b: PolygonBoundary, m: Matching, budget: int) -> tuple[list[Tile] | None, int]:
    """Depth-first search over all valid corners, with failed states memoised."""
    st = _Boundary(b, m.partner)
    dead: set = set()
    nodes = 0

    def rec() -> list[Tile] | None:
        nonlocal st, nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"tiling search exceeded budget of {budget} nodes")
        while len(st) and st.cancel_ends():
            pass
        if not len(st):
            return []
        key = (st.state(), tuple(st.P))
        if key in dead:
            return None
        snapshot = (list(st.W), list(st.P), list(st.V))
        for p in range(len(st)):
            if not st.valid(p):
                continue
            tile = st.place(p)
            rest = rec()
            if rest is not None:
                return [tile] + rest
            st.W, st.P, st.V = list(snapshot[0]), list(snapshot[1]), list(snapshot[2])
        dead.add(key)
        return None

    return rec(), nodes


def tile_polygon(
    b: PolygonBoundary,
    budget: int = DEFAULT_BUDGET,
    symmetric: bool | None = None,
    matching_limit: int = 10_000,
) -> TilingOutcome:
    """Tile a simple counterclockwise lattice polygon by rhombi, or show it cannot be done.

    The verdict comes from the Kenyon conditions.  A witness tiling is built by
    placing tiles at convex corners whose two chains cross.  Centrally
    symmetric polygons get a centrally symmetric tiling when possible.
    Exceeding ``budget`` raises BudgetExceeded.
    """
    n = b.n
    if not b.is_closed():
        raise ValidationError("polygon is not closed in the lattice")
    if len(b) == 0:
        return TilingOutcome(True, Patch(n), MatchingReport(True), "empty")
    if b.signed_area() <= 0:
        raise ValidationError("polygon must be counterclockwise with positive area")
    if symmetric is None:
        symmetric = _symmetric(b)
    first = unique_matching(b)
    candidates = [first] if first.contiguous else all_matchings(b, matching_limit)
    report = None
    for m in candidates:
        rep = verify_matching(b, m)
        if report is None:
            report = rep
        if not rep.ok:
            continue
        report = rep
        if symmetric:
            tiles, done, steps = _greedy(b, m, True, budget)
            if done:
                return TilingOutcome(True, Patch.from_tiles(n, tiles), rep, "symmetric", steps)
        tiles, done, steps = _greedy(b, m, False, budget)
        if done:
            return TilingOutcome(True, Patch.from_tiles(n, tiles), rep, "greedy", steps)
        found, nodes = _backtrack(b, m, budget)
        if found is not None:
            return TilingOutcome(True, Patch.from_tiles(n, found), rep, "search", nodes)
    return TilingOutcome(False, None, report, "kenyon")
