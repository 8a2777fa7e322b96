"""De Bruijn multigrids and their dual rhombus tilings.

Grid i is the family of lines Re(z conj(zeta^i)) + gamma_i = k, k in Z, with
zeta = exp(2 i pi / n).  Each crossing of a line of grid i with a line of grid
j is dual to a rhombus with edges v_i, v_j, and the cell containing z is dual
to the vertex sum_l ceil(Re(z conj(zeta^l)) + gamma_l) v_l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cyclotomic import CyclotomicField
from .errors import ValidationError
from .lattice import Patch, check_n, tile_class

TOL = 1e-10


def parse_offset(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"malformed offset {text!r}; expected p/q") from exc


@dataclass(frozen=True)
class MultigridSpec:
    n: int
    offsets: tuple[Fraction, ...]
    radius: float

    def __post_init__(self):
        check_n(self.n)
        offs = tuple(Fraction(g) for g in self.offsets)
        if len(offs) == 1:
            offs = offs * self.n
        if len(offs) != self.n:
            raise ValidationError(f"need 1 or {self.n} offsets, got {len(offs)}")
        object.__setattr__(self, "offsets", offs)
        if not self.radius > 0:
            raise ValidationError("radius must be positive")

    @classmethod
    def uniform(cls, n: int, offset="1/2", radius: float = 10.0) -> "MultigridSpec":
        return cls(n, (Fraction(offset),), radius)

    def gamma(self) -> np.ndarray:
        return np.array([float(g) for g in self.offsets])


@dataclass(frozen=True)
class GridIntersection:
    i: int
    ki: int
    j: int
    kj: int
    point: complex


def _angles(n: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n) / n


def _solve(n: int, i: int, j: int, ai, aj):
    """Points z with Re(z conj(zeta^i)) = ai and Re(z conj(zeta^j)) = aj (arrays)."""
    th = _angles(n)
    ci, si, cj, sj = math.cos(th[i]), math.sin(th[i]), math.cos(th[j]), math.sin(th[j])
    det = ci * sj - si * cj
    x = (ai * sj - aj * si) / det
    y = (ci * aj - cj * ai) / det
    return x + 1j * y


def _line_range(g: float, radius: float) -> np.ndarray:
    # lines of one grid at distance |k - g| from the origin
    return np.arange(math.ceil(g - radius), math.floor(g + radius) + 1)


def intersections(spec: MultigridSpec) -> list[GridIntersection]:
    """All crossings inside the disk of the given radius, sorted by (i, j, k_i, k_j)."""
    n, R, g = spec.n, spec.radius, spec.gamma()
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            ki = _line_range(g[i], R)
            kj = _line_range(g[j], R)
            KI, KJ = np.meshgrid(ki, kj, indexing="ij")
            z = _solve(n, i, j, KI - g[i], KJ - g[j])
            keep = np.abs(z) <= R
            for a, b, p in zip(KI[keep].tolist(), KJ[keep].tolist(), z[keep].tolist()):
                out.append(GridIntersection(i, int(a), j, int(b), complex(p)))
    return out


def _grid_values(z: np.ndarray, spec: MultigridSpec) -> np.ndarray:
    th = _angles(spec.n)
    return z.real[:, None] * np.cos(th)[None, :] + z.imag[:, None] * np.sin(th)[None, :] + spec.gamma()[None, :]


@dataclass
class RegularityReport:
    ok: bool
    triple_points: list[tuple[complex, tuple[int, ...]]]
    crossings: int
    backend: str


def _float_triples(spec: MultigridSpec, pts: list[GridIntersection], tol: float) -> list[tuple[GridIntersection, int]]:
    if not pts:
        return []
    z = np.array([p.point for p in pts])
    vals = _grid_values(z, spec)
    hit = np.abs(vals - np.round(vals)) < tol * max(1.0, spec.radius)
    out = []
    for row, p in enumerate(pts):
        for l in np.nonzero(hit[row])[0].tolist():
            if l not in (p.i, p.j):
                out.append((p, l))
    return out


class _ExactGrid:
    """Line values at crossings computed in Q(zeta_n).

    With w = z and its conjugate treated as field elements, the crossing of
    lines i and j is z = 2 (a_i zeta^j - a_j zeta^i) / (zeta^(j-i) - zeta^(i-j)),
    so Re(z conj(zeta^l)) = a_i U_l - a_j V_l for fixed field elements U, V.
    """

    def __init__(self, n: int):
        self.F = CyclotomicField(n)
        self.n = n
        self.cache: dict[tuple[int, int], list[tuple]] = {}

    def coefficients(self, i: int, j: int):
        key = (i, j)
        if key not in self.cache:
            F = self.F
            dinv = F.inv(F.sub(F.zeta(j - i), F.zeta(i - j)))
            P = F.scale(F.mul(F.zeta(j), dinv), 2)
            Q = F.scale(F.mul(F.zeta(i), dinv), 2)

            def re(w, l):
                return F.scale(F.add(F.mul(w, F.zeta(-l)), F.mul(F.conj(w), F.zeta(l))), Fraction(1, 2))

            self.cache[key] = [(re(P, l), re(Q, l)) for l in range(self.n)]
        return self.cache[key]

    def value(self, p: GridIntersection, l: int, spec: MultigridSpec):
        F = self.F
        U, V = self.coefficients(p.i, p.j)[l]
        ai = p.ki - spec.offsets[p.i]
        aj = p.kj - spec.offsets[p.j]
        return F.add(F.sub(F.scale(U, ai), F.scale(V, aj)), F.rational(spec.offsets[l]))


def regularity_check(spec: MultigridSpec, exact: bool = False, tol: float = TOL) -> RegularityReport:
    """Look for points inside the disk where three or more grid lines meet.

    The float backend flags a third line within tol.  The exact backend
    decides every candidate in Q(zeta_n), so only true triple points survive;
    it also rechecks near-misses of the float test with a loose tolerance.
    """
    pts = intersections(spec)
    if exact:
        grid = _ExactGrid(spec.n)
        cand = _float_triples(spec, pts, 1e-6)
        hits = [(p, l) for p, l in cand if grid.F.is_integer(grid.value(p, l, spec))]
    else:
        hits = _float_triples(spec, pts, tol)
    triples: dict[tuple[float, float], set[int]] = {}
    where: dict[tuple[float, float], complex] = {}
    for p, l in hits:
        key = (round(p.point.real, 8), round(p.point.imag, 8))
        triples.setdefault(key, set()).update((p.i, p.j, l))
        where[key] = p.point
    listed = [(where[k], tuple(sorted(v))) for k, v in sorted(triples.items())]
    return RegularityReport(not listed, listed, len(pts), "exact" if exact else "float")


def cell_vector(spec: MultigridSpec, z: complex) -> np.ndarray:
    """ceil(Re(z conj(zeta^l)) + gamma_l) for every grid; z must avoid all lines."""
    vals = _grid_values(np.array([z]), spec)[0]
    if np.any(np.abs(vals - np.round(vals)) < TOL):
        raise ValidationError(f"point {z} lies on a grid line")
    return np.ceil(vals).astype(np.int64)


def dual_point(spec: MultigridSpec, z: complex) -> complex:
    """Plane position of the vertex dual to the cell containing z."""
    K = cell_vector(spec, z)
    return complex(np.sum(K * np.exp(1j * _angles(spec.n))))


def base_cell(spec: MultigridSpec) -> np.ndarray:
    """Cell vector of the origin's cell, or of a fixed nearby point if the origin lies on a line."""
    for z in (0j, 1e-6 * complex(0.318, 0.731)):
        try:
            return cell_vector(spec, z)
        except ValidationError:
            continue
    raise ValidationError("cannot pick a base cell near the origin")


def dual_tiling(spec: MultigridSpec, check: bool = True) -> Patch:
    """One rhombus per crossing inside the disk, in lattice coordinates.

    At the crossing of lines (i, k_i) and (j, k_j) the four surrounding cells
    have vectors K + {0, e_i, e_j, e_i + e_j} where K takes k_i, k_j on grids
    i, j and the ceilings of the line values elsewhere.  The base cell is
    subtracted so the origin's cell becomes the lattice origin.
    """
    if check:
        rep = regularity_check(spec, exact=True)
        if not rep.ok:
            raise ValidationError(f"singular multigrid: lines meet at {rep.triple_points[0][0]}")
    pts = intersections(spec)
    n = spec.n
    if not pts:
        return Patch(n)
    z = np.array([p.point for p in pts])
    K = np.ceil(_grid_values(z, spec)).astype(np.int64)
    rows = np.arange(len(pts))
    I = np.array([p.i for p in pts])
    J = np.array([p.j for p in pts])
    K[rows, I] = [p.ki for p in pts]
    K[rows, J] = [p.kj for p in pts]
    return Patch(n, K - base_cell(spec), np.stack([I, J], axis=1))


def ray_crossings(spec: MultigridSpec, direction: complex, count: int, tol: float = 1e-9) -> list[GridIntersection]:
    """Crossings on the half-line from 0 in ``direction``, in order of distance."""
    d = direction / abs(direction)
    pts = [p for p in intersections(spec) if abs((p.point * d.conjugate()).imag) < tol and (p.point * d.conjugate()).real > 0]
    pts.sort(key=lambda p: (p.point * d.conjugate()).real)
    return pts[:count]


def ray_word(spec: MultigridSpec, m: int, count: int) -> list[int]:
    """Rhombus angle classes crossed by the ray at angle pi/2 + m pi / n."""
    if count == 0:
        return []
    n = spec.n
    direction = complex(math.cos(math.pi / 2 + m * math.pi / n), math.sin(math.pi / 2 + m * math.pi / n))
    pts = ray_crossings(spec, direction, count)
    if len(pts) < count:
        raise ValidationError(f"radius {spec.radius} too small for {count} crossings")
    return [tile_class(p.i, p.j, n) for p in pts]


def vertical_ray_word(spec: MultigridSpec, count: int) -> list[int]:
    """Rhombus types met along the positive imaginary axis.

    Lines of grids l and n - l are mirror images in that axis and cross on it,
    so only those pairs are solved: their crossing with lines (l, k) and
    (n - l, 1 - k) lies at height (k - 1/2) / sin(2 pi l / n).
    """
    if count < 0:
        raise ValidationError("count must be non-negative")
    n = spec.n
    if any(g != Fraction(1, 2) for g in spec.offsets):
        raise ValidationError("the vertical ray word is defined for offsets 1/2")
    if count == 0:
        return []
    found = []
    for l in range(1, (n + 1) // 2):
        k = np.arange(1, count + 2)
        z = _solve(n, l, n - l, k - 0.5, (1 - k) - 0.5)
        if not np.all(np.abs(z.real) < 1e-9 * np.maximum(1, np.abs(z))):
            raise AssertionError("mirror crossings left the axis")
        letter = tile_class(l, n - l, n)
        found += [(float(y), letter) for y in z.imag]
    found.sort()
    return [t for _, t in found[:count]]


def offsets_from_text(text: str, n: int) -> tuple[Fraction, ...]:
    parts = [parse_offset(s) for s in text.split(",")]
    return tuple(parts) if len(parts) > 1 else tuple(parts) * n


def spec_from_args(n: int, offset: str, radius: float) -> MultigridSpec:
    return MultigridSpec(check_n(n), offsets_from_text(offset, n), radius)


def grid_lines(spec: MultigridSpec) -> list[tuple[int, int]]:
    """(grid, k) for every line meeting the disk."""
    g = spec.gamma()
    return [(i, int(k)) for i in range(spec.n) for k in _line_range(g[i], spec.radius)]

