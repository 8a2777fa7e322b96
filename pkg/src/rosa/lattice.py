"""Lattice lift of rhombus tilings with 2n edge directions.

A vertex is a point x of Z^n, placed in the plane at sum_k x_k v_k with
v_k = exp(2 i pi k / n).  Plane directions are indexed by m in [0, 2n), the
unit vector exp(i pi m / n).  Even m = 2k is +e_k; odd m is -e_k where
m = 2k + n (mod 2n).  A tile (anchor x, j, k) with j < k is the unit square
x + [0,1] e_j + [0,1] e_k, which projects to a rhombus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import ValidationError

EMBED_TOL = 1e-9


def check_n(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValidationError(f"n must be an odd integer >= 3, got {n!r}")
    n = int(n)
    if n < 3 or n % 2 == 0:
        raise ValidationError(f"n must be odd and >= 3, got {n}")
    return n


def unit_roots(n: int) -> np.ndarray:
    """The n edge vectors v_k as complex numbers."""
    return np.exp(2j * np.pi * np.arange(n) / n)


def embed(x, n: int):
    """Plane position of lattice point(s) x, shape (..., n) -> complex (...)."""
    arr = np.asarray(x)
    if arr.shape[-1] != n:
        raise ValidationError(f"lattice vector has {arr.shape[-1]} coordinates, expected {n}")
    z = arr @ unit_roots(n)
    return complex(z) if np.ndim(z) == 0 else z


def direction_vector(m: int, n: int) -> complex:
    return complex(np.exp(1j * np.pi * (m % (2 * n)) / n))


def direction_step(m: int, n: int) -> tuple[int, int]:
    """Lattice basis index and sign of plane direction m."""
    m %= 2 * n
    if m % 2 == 0:
        return m // 2, 1
    return ((m - n) // 2) % n, -1


def direction_index(k: int, sign: int, n: int) -> int:
    """Inverse of direction_step."""
    return (2 * k) % (2 * n) if sign > 0 else (2 * k + n) % (2 * n)


def step_vector(m: int, n: int) -> np.ndarray:
    k, s = direction_step(m, n)
    v = np.zeros(n, dtype=np.int64)
    v[k] = s
    return v


def rotate_vector(x, n: int, r: int = 1) -> np.ndarray:
    """Rotate lattice vector(s) by r * pi / n.

    One step sends e_k to -e_{k + (n+1)/2}.
    """
    arr = np.asarray(x, dtype=np.int64)
    r %= 2 * n
    idx = (np.arange(n) + r * ((n + 1) // 2)) % n
    out = np.empty_like(arr)
    out[..., idx] = arr if r % 2 == 0 else -arr
    return out


def tile_class(j: int, k: int, n: int) -> int:
    """Odd t such that the rhombus with edges v_j, v_k has angles t pi/n and (n-t) pi/n."""
    return abs(n - 2 * (k - j))


class Tile(NamedTuple):
    anchor: tuple[int, ...]
    j: int
    k: int

    def vertices(self) -> list[tuple[int, ...]]:
        """Lattice corners in counterclockwise order, starting at the anchor."""
        n = len(self.anchor)
        x = np.array(self.anchor, dtype=np.int64)
        ej = np.zeros(n, dtype=np.int64)
        ek = np.zeros(n, dtype=np.int64)
        ej[self.j] = 1
        ek[self.k] = 1
        if 2 * (self.k - self.j) < n:
            ring = [x, x + ej, x + ej + ek, x + ek]
        else:
            ring = [x, x + ek, x + ej + ek, x + ej]
        return [tuple(int(c) for c in v) for v in ring]

    def area(self) -> float:
        n = len(self.anchor)
        return abs(math.sin(2 * math.pi * (self.k - self.j) / n))


def tile_from_edges(corner, a: int, b: int, n: int) -> Tile:
    """Tile spanned at a lattice corner by plane directions a and b."""
    ka, sa = direction_step(a, n)
    kb, sb = direction_step(b, n)
    if ka == kb:
        raise ValidationError("a rhombus needs two different edge types")
    anchor = np.array(corner, dtype=np.int64).copy()
    if sa < 0:
        anchor[ka] -= 1
    if sb < 0:
        anchor[kb] -= 1
    j, k = sorted((ka, kb))
    return Tile(tuple(int(c) for c in anchor), j, k)


class Patch:
    """Finite set of tiles, stored as sorted integer arrays.

    ``anchors`` has shape (N, n); ``types`` has shape (N, 2) holding (j, k).
    Rows are kept in lexicographic (anchor, j, k) order so that equal patches
    compare equal and serialise identically.
    """

    def __init__(self, n: int, anchors=None, types=None, dedupe: bool = True):
        self.n = check_n(n)
        if anchors is None:
            anchors = np.zeros((0, self.n), dtype=np.int64)
            types = np.zeros((0, 2), dtype=np.int64)
        a = np.asarray(anchors, dtype=np.int64).reshape(-1, self.n)
        t = np.asarray(types, dtype=np.int64).reshape(-1, 2)
        if len(a) != len(t):
            raise ValidationError("anchor and type arrays differ in length")
        if len(t) and not (np.all(t[:, 0] >= 0) and np.all(t[:, 0] < t[:, 1]) and np.all(t[:, 1] < self.n)):
            raise ValidationError("tile types must satisfy 0 <= j < k < n")
        rows = np.concatenate([a, t], axis=1)
        if dedupe:
            rows = np.unique(rows, axis=0) if len(rows) else rows
        elif len(rows):
            rows = rows[np.lexsort(rows.T[::-1])]
        self.anchors = np.ascontiguousarray(rows[:, : self.n])
        self.types = np.ascontiguousarray(rows[:, self.n :])

    @classmethod
    def from_tiles(cls, n: int, tiles: Iterable[Tile], dedupe: bool = True) -> "Patch":
        tiles = list(tiles)
        if not tiles:
            return cls(n)
        if any(len(t.anchor) != n for t in tiles):
            raise ValidationError(f"tile anchors must have {n} coordinates")
        a = np.array([t.anchor for t in tiles], dtype=np.int64)
        t = np.array([(t.j, t.k) for t in tiles], dtype=np.int64)
        return cls(n, a, t, dedupe=dedupe)

    def __len__(self) -> int:
        return len(self.anchors)

    def __iter__(self) -> Iterator[Tile]:
        for a, t in zip(self.anchors.tolist(), self.types.tolist()):
            yield Tile(tuple(a), t[0], t[1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Patch):
            return NotImplemented
        return (
            self.n == other.n
            and self.anchors.shape == other.anchors.shape
            and np.array_equal(self.anchors, other.anchors)
            and np.array_equal(self.types, other.types)
        )

    def __repr__(self) -> str:
        return f"Patch(n={self.n}, tiles={len(self)})"

    def rows(self) -> np.ndarray:
        return np.concatenate([self.anchors, self.types], axis=1)

    def tile_set(self) -> set[Tile]:
        return set(self)

    def has_duplicates(self) -> bool:
        if len(self) < 2:
            return False
        r = self.rows()
        return bool(np.any(np.all(r[1:] == r[:-1], axis=1)))

    def union(self, other: "Patch") -> "Patch":
        return Patch(
            self.n,
            np.concatenate([self.anchors, other.anchors]),
            np.concatenate([self.types, other.types]),
        )

    def translate(self, v) -> "Patch":
        v = np.asarray(v, dtype=np.int64)
        return Patch(self.n, self.anchors + v, self.types, dedupe=False)

    def vertex_array(self) -> np.ndarray:
        """Corners of every tile, shape (N, 4, n), counterclockwise."""
        n = self.n
        N = len(self)
        eye = np.eye(n, dtype=np.int64)
        ej = eye[self.types[:, 0]] if N else np.zeros((0, n), dtype=np.int64)
        ek = eye[self.types[:, 1]] if N else np.zeros((0, n), dtype=np.int64)
        x = self.anchors
        ccw = (2 * (self.types[:, 1] - self.types[:, 0]) < n)[:, None]
        second = np.where(ccw, x + ej, x + ek)
        fourth = np.where(ccw, x + ek, x + ej)
        return np.stack([x, second, x + ej + ek, fourth], axis=1)

    def vertices(self) -> np.ndarray:
        """Distinct lattice vertices, shape (V, n)."""
        if not len(self):
            return np.zeros((0, self.n), dtype=np.int64)
        return np.unique(self.vertex_array().reshape(-1, self.n), axis=0)

    def areas(self) -> np.ndarray:
        return np.abs(np.sin(2 * np.pi * (self.types[:, 1] - self.types[:, 0]) / self.n))

    def area(self) -> float:
        return float(self.areas().sum())

    def type_counts(self) -> dict[tuple[int, int], int]:
        keys, counts = np.unique(self.types, axis=0, return_counts=True) if len(self) else ([], [])
        return {(int(a), int(b)): int(c) for (a, b), c in zip(keys, counts)}

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "tiles": [{"anchor": list(t.anchor), "j": t.j, "k": t.k} for t in self],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Patch":
        try:
            n = check_n(data["n"])
            tiles = [Tile(tuple(int(c) for c in t["anchor"]), int(t["j"]), int(t["k"])) for t in data["tiles"]]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed patch JSON: {exc}") from exc
        return cls.from_tiles(n, tiles, dedupe=False)


def rotate_patch(p: Patch, r: int = 1) -> Patch:
    """Rotate a patch by r * pi / n about the lattice origin."""
    n = p.n
    r %= 2 * n
    if not len(p):
        return Patch(n)
    shift = r * ((n + 1) // 2)
    anchors = rotate_vector(p.anchors, n, r)
    types = (p.types + shift) % n
    if r % 2:
        # images of e_j, e_k point backwards, so the anchor moves to the far corner
        rows = np.arange(len(p))
        anchors[rows, types[:, 0]] -= 1
        anchors[rows, types[:, 1]] -= 1
    types = np.sort(types, axis=1)
    return Patch(n, anchors, types, dedupe=False)


def star_patch(n: int) -> Patch:
    """The 2n narrow rhombi of angle pi/n around the origin."""
    n = check_n(n)
    origin = np.zeros(n, dtype=np.int64)
    return Patch.from_tiles(n, [tile_from_edges(origin, m, m + 1, n) for m in range(2 * n)])


@dataclass(frozen=True)
class PolygonBoundary:
    """Closed lattice path given as a start vertex and plane direction indices."""

    n: int
    edges: tuple[int, ...]
    start: tuple[int, ...] = field(default=())

    def __post_init__(self):
        check_n(self.n)
        object.__setattr__(self, "edges", tuple(int(m) % (2 * self.n) for m in self.edges))
        if not self.start:
            object.__setattr__(self, "start", (0,) * self.n)
        if len(self.start) != self.n:
            raise ValidationError("polygon start vertex has the wrong dimension")

    def __len__(self) -> int:
        return len(self.edges)

    def vertices(self) -> np.ndarray:
        """Lattice vertices, shape (E + 1, n); the last equals the first when closed."""
        steps = np.zeros((len(self.edges), self.n), dtype=np.int64)
        for i, m in enumerate(self.edges):
            k, s = direction_step(m, self.n)
            steps[i, k] = s
        out = np.zeros((len(self.edges) + 1, self.n), dtype=np.int64)
        out[0] = self.start
        out[1:] = np.cumsum(steps, axis=0) + np.asarray(self.start, dtype=np.int64)
        return out

    def points(self) -> np.ndarray:
        return embed(self.vertices(), self.n)

    def is_closed(self) -> bool:
        v = self.vertices()
        return bool(np.array_equal(v[0], v[-1]))

    def signed_area(self) -> float:
        z = self.points()
        return float(0.5 * np.sum((np.conj(z[:-1]) * z[1:]).imag))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": list(self.edges), "start": list(self.start)}

    @classmethod
    def from_json(cls, data: dict) -> "PolygonBoundary":
        try:
            return cls(int(data["n"]), tuple(int(m) for m in data["edges"]), tuple(data.get("start", ())))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed polygon JSON: {exc}") from exc


@dataclass
class PatchReport:
    ok: bool
    violations: list[str]

    def __bool__(self) -> bool:
        return self.ok


def _edge_table(p: Patch):
    """Directed ccw edges of every tile: start vertex, end vertex, direction index."""
    n = p.n
    verts = p.vertex_array()
    starts = verts.reshape(-1, n)
    ends = np.roll(verts, -1, axis=1).reshape(-1, n)
    diff = ends - starts
    k = np.argmax(np.abs(diff), axis=1)
    sign = diff[np.arange(len(diff)), k]
    dirs = np.where(sign > 0, (2 * k) % (2 * n), (2 * k + n) % (2 * n))
    return starts, ends, dirs, k, sign


def _boundary_edges(p: Patch):
    starts, ends, dirs, k, sign = _edge_table(p)
    lower = np.where((sign > 0)[:, None], starts, ends)
    keys = np.concatenate([lower, k[:, None]], axis=1)
    _, inv, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    inv = inv.reshape(-1)
    mult = counts[inv]
    return starts, ends, dirs, mult


def boundary_edge_set(p: Patch) -> set[tuple[tuple[int, ...], int]]:
    """Directed boundary edges (start vertex, direction) of a patch, pinches allowed."""
    if not len(p):
        return set()
    starts, _, dirs, mult = _boundary_edges(p)
    sel = mult == 1
    return set(zip(map(tuple, starts[sel].tolist()), dirs[sel].tolist()))


def polygon_edge_set(b: PolygonBoundary) -> set[tuple[tuple[int, ...], int]]:
    v = b.vertices()
    return set(zip(map(tuple, v[:-1].tolist()), b.edges))


def fills_polygon(p: Patch, b: PolygonBoundary) -> bool:
    """True when the boundary of p is exactly the edge set of b."""
    return boundary_edge_set(p) == polygon_edge_set(b)


def _walk_boundary(n: int, starts, ends, dirs):
    """Follow directed boundary edges keeping the region on the left.

    Returns the list of cycles, each as (start vertex, [directions]).
    """
    out_edges: dict[tuple, list] = {}
    for s, e, d in zip(map(tuple, starts.tolist()), map(tuple, ends.tolist()), dirs.tolist()):
        out_edges.setdefault(s, []).append((d, e))
    remaining = {(s, d) for s, lst in out_edges.items() for d, _ in lst}
    cycles = []
    while remaining:
        s0 = min(v for v, _ in remaining)
        d0 = min(d for v, d in remaining if v == s0)
        cur, d = s0, d0
        path = []
        while (cur, d) in remaining:
            remaining.discard((cur, d))
            path.append(d)
            cur = next(e for dd, e in out_edges[cur] if dd == d)
            back = (d + n) % (2 * n)
            options = out_edges.get(cur)
            if not options:
                break
            # first outgoing edge met turning clockwise from the reversed incoming one
            d = min(options, key=lambda o: (back - o[0]) % (2 * n) or 2 * n)[0]
        cycles.append((s0, path))
    return cycles


def boundary_polygon(p: Patch) -> PolygonBoundary:
    """Counterclockwise boundary of a simply connected patch.

    The walk starts at the lexicographically smallest boundary vertex.
    """
    if not len(p):
        raise ValidationError("empty patch has no boundary")
    starts, ends, dirs, mult = _boundary_edges(p)
    sel = mult == 1
    cycles = _walk_boundary(p.n, starts[sel], ends[sel], dirs[sel])
    if len(cycles) != 1:
        raise ValidationError(f"patch boundary has {len(cycles)} components; not simply connected")
    start, path = cycles[0]
    return PolygonBoundary(p.n, tuple(path), start)


def _vertex_sectors(p: Patch):
    """Angular sector occupied by each tile at each of its corners (units of pi/n)."""
    n = p.n
    starts, ends, dirs, _, _ = _edge_table(p)
    N = len(p)
    out_dir = dirs.reshape(N, 4)
    in_dir = np.roll(out_dir, 1, axis=1)
    back = (in_dir + n) % (2 * n)
    # interior of a ccw polygon lies clockwise from the reversed incoming edge
    start = out_dir
    width = (back - out_dir) % (2 * n)
    verts = p.vertex_array().reshape(-1, n)
    return verts, start.reshape(-1), width.reshape(-1)


def _sector_violations(p: Patch) -> list[str]:
    n = p.n
    verts, start, width = _vertex_sectors(p)
    _, vid = np.unique(verts, axis=0, return_inverse=True)
    vid = vid.reshape(-1)
    order = np.lexsort((start, vid))
    vid_s, start_s, width_s = vid[order], start[order], width[order]
    out = []
    total = np.bincount(vid_s, weights=width_s)
    over = np.nonzero(total > 2 * n)[0]
    if len(over):
        out.append(f"{len(over)} vertices with angle sum above 2 pi")
    same = vid_s[1:] == vid_s[:-1]
    clash = same & (start_s[:-1] + width_s[:-1] > start_s[1:])
    # wrap-around between the last and first sector of each vertex
    first = np.r_[True, ~same]
    last = np.r_[~same, True]
    wrap = (start_s[last] + width_s[last]) - 2 * n > start_s[first]
    multi = np.bincount(vid_s)[vid_s[last]] > 1
    n_bad = int(clash.sum() + (wrap & multi).sum())
    if n_bad:
        out.append(f"{n_bad} overlapping tile corners")
    return out


def _geometric_violations(p: Patch, tol: float = 1e-9) -> list[str]:
    """Pairwise test of nearby tiles for interior overlap and T-junctions."""
    N = len(p)
    if N < 2:
        return []
    quads = embed(p.vertex_array(), p.n)  # (N, 4)
    centers = quads.mean(axis=1)
    cell = np.floor(np.stack([centers.real, centers.imag], axis=1) / 2.0).astype(np.int64)
    base = cell.min(axis=0)
    cell -= base
    width = int(cell[:, 1].max()) + 3
    key = cell[:, 0] * width + cell[:, 1]
    order = np.argsort(key, kind="stable")
    skey = key[order]
    pairs_a, pairs_b = [], []
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            target = key + dx * width + dy
            lo = np.searchsorted(skey, target, "left")
            hi = np.searchsorted(skey, target, "right")
            cnt = hi - lo
            a = np.repeat(np.arange(N), cnt)
            offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
            b = order[np.repeat(lo, cnt) + offs]
            keep = a < b
            pairs_a.append(a[keep])
            pairs_b.append(b[keep])
    A = np.concatenate(pairs_a)
    B = np.concatenate(pairs_b)
    overlaps = 0
    tjunctions = 0
    chunk = 200_000
    for s in range(0, len(A), chunk):
        qa, qb = quads[A[s : s + chunk]], quads[B[s : s + chunk]]
        overlaps += int(_sat_overlap(qa, qb, tol).sum())
        tjunctions += int(_tjunction(qa, qb, tol).sum() + _tjunction(qb, qa, tol).sum())
    out = []
    if overlaps:
        out.append(f"{overlaps} pairs of overlapping tiles")
    if tjunctions:
        out.append(f"{tjunctions} vertices lying inside another tile's edge (not edge-to-edge)")
    return out


def _sat_overlap(qa: np.ndarray, qb: np.ndarray, tol: float) -> np.ndarray:
    separated = np.zeros(len(qa), dtype=bool)
    for q in (qa, qb):
        for e in range(2):
            edge = q[:, e + 1] - q[:, e]
            normal = 1j * edge
            pa = (np.conj(normal)[:, None] * qa).real
            pb = (np.conj(normal)[:, None] * qb).real
            separated |= (pa.max(axis=1) <= pb.min(axis=1) + tol) | (pb.max(axis=1) <= pa.min(axis=1) + tol)
    return ~separated


def _tjunction(qa: np.ndarray, qb: np.ndarray, tol: float) -> np.ndarray:
    """Vertices of qb strictly inside an edge of qa."""
    hit = np.zeros(len(qa), dtype=bool)
    for e in range(4):
        a = qa[:, e][:, None]
        b = qa[:, (e + 1) % 4][:, None]
        d = b - a
        rel = qb - a
        t = (np.conj(d) * rel).real / (np.abs(d) ** 2)
        dist = np.abs((np.conj(d) * rel).imag) / np.abs(d)
        hit |= np.any((dist < tol) & (t > tol) & (t < 1 - tol), axis=1)
    return hit


def validate_patch(p: Patch, geometric: bool = True) -> PatchReport:
    """Check that a patch is an edge-to-edge, overlap-free, simply connected tiling."""
    v: list[str] = []
    if not len(p):
        return PatchReport(True, [])
    if p.has_duplicates():
        v.append("duplicate tiles")
    v += _sector_violations(p)
    verts = p.vertices()
    z = embed(verts, p.n)
    rounded = np.round(np.stack([z.real, z.imag], axis=1) / EMBED_TOL).astype(np.int64)
    if len(np.unique(rounded, axis=0)) != len(verts):
        v.append("distinct lattice vertices embed to the same plane point")
    if geometric:
        v += _geometric_violations(p)
    starts, ends, dirs, mult = _boundary_edges(p)
    if np.any(mult > 2):
        v.append("edge shared by more than two tiles")
    sel = mult == 1
    if not v:
        cycles = _walk_boundary(p.n, starts[sel], ends[sel], dirs[sel])
        if len(cycles) != 1:
            v.append(f"boundary has {len(cycles)} closed curves; patch is not simply connected")
    return PatchReport(not v, v)


def tiles_of(patch_or_tiles: Patch | Sequence[Tile]) -> list[Tile]:
    return list(patch_or_tiles)
