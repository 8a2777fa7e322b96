"""Projection of lifted patches onto the invariant subspaces of the expansion.

R^n splits orthogonally into the diagonal Delta, the tiling plane E_0 and the
planes E_1, ..., E_{n//2 - 1}.  Coordinates are normalised so that
|x|^2 = delta^2 + sum |c_j|^2.  A rule is planar when its lifted patches stay
at bounded distance from E_0, which shows up here as bounded diameters on
every subspace other than E_0.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .circulant import eigenvalues
from .edgeword import abelianize, format_edgeword
from .errors import BudgetExceeded, ValidationError
from .lattice import Patch, check_n, rotate_vector, tile_class, tile_from_edges
from .substitution import TILE_BUDGET, SubstitutionRule, apply, representatives


@dataclass(frozen=True)
class SpectralCoordinates:
    delta: float
    e: np.ndarray  # complex, c_0 .. c_{n//2 - 1}

    def norm2(self) -> float:
        return self.delta**2 + float(np.sum(np.abs(self.e) ** 2))


def spectral_matrix(n: int) -> np.ndarray:
    """Complex (n//2, n) matrix whose rows give the c_j."""
    n = check_n(n)
    k = np.arange(n)
    odd = 2 * np.arange(n // 2) + 1
    return math.sqrt(2 / n) * np.exp(2j * np.pi * np.outer(odd, k) / n)


def real_basis(n: int) -> np.ndarray:
    """Orthogonal (n, n) matrix with rows Delta, Re c_0, Im c_0, Re c_1, ..."""
    C = spectral_matrix(n)
    rows = [np.full(n, 1 / math.sqrt(n))]
    for c in C:
        rows += [c.real, c.imag]
    return np.array(rows)


def spectral_coords(x, n: int) -> SpectralCoordinates:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValidationError(f"expected a vector of length {n}")
    return SpectralCoordinates(float(x.sum()) / math.sqrt(n), spectral_matrix(n) @ x)


def subspace_names(n: int) -> list[str]:
    return ["delta"] + [f"E{j}" for j in range(n // 2)]


def _hull_points(pts: np.ndarray) -> np.ndarray:
    if pts.shape[1] == 1:
        return pts[[int(pts.argmin()), int(pts.argmax())]] if len(pts) else pts
    if len(pts) <= pts.shape[1] + 1:
        return pts
    try:
        return pts[ConvexHull(pts).vertices]
    except QhullError:
        # degenerate (flat) point sets; fall back to all points
        return pts


def _max_distance(pts: np.ndarray) -> float:
    best = 0.0
    chunk = max(1, 4_000_000 // (len(pts) * pts.shape[1]))
    for s in range(0, len(pts), chunk):
        block = pts[s : s + chunk]
        d = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)
        best = max(best, float(d.max()))
    return math.sqrt(best)


def point_diameter(pts: np.ndarray) -> float:
    """Euclidean diameter of a real point cloud (rows)."""
    pts = np.asarray(pts, dtype=float)
    if len(pts) < 2:
        return 0.0
    if pts.shape[1] == 1:
        return float(pts.max() - pts.min())
    return _max_distance(_hull_points(pts))


def _eperp_indices(n: int) -> list[int]:
    # rows of real_basis outside the tiling plane
    return [0] + list(range(3, n))


@dataclass
class DiameterReport:
    total: float  # diameter of the projection onto the orthogonal complement of E_0
    per_subspace: dict[str, float]


def _vertex_points(p) -> np.ndarray:
    if isinstance(p, Patch):
        if not len(p):
            raise ValidationError("empty patch has no diameter")
        return p.vertices()
    pts = np.asarray(p)
    if pts.ndim != 2 or not len(pts):
        raise ValidationError("expected a non-empty (V, n) vertex array")
    return pts


def subspace_diameters(vertices: np.ndarray, n: int) -> dict[str, float]:
    y = vertices.astype(float) @ real_basis(n).T
    out = {"delta": point_diameter(y[:, :1])}
    for j in range(n // 2):
        out[f"E{j}"] = point_diameter(y[:, 1 + 2 * j : 3 + 2 * j])
    return out


def eperp_diameter(p, n: int | None = None) -> DiameterReport:
    """Diameter of the vertex set projected onto Delta + E_1 + ..., with the breakdown per subspace."""
    pts = _vertex_points(p)
    n = p.n if isinstance(p, Patch) else check_n(n if n is not None else pts.shape[1])
    y = pts.astype(float) @ real_basis(n).T
    return DiameterReport(point_diameter(y[:, _eperp_indices(n)]), subspace_diameters(pts, n))


def rotation_action(n: int, r: int = 1) -> np.ndarray:
    """Rotation by r pi / n written in the real spectral basis (block diagonal, orthogonal)."""
    B = real_basis(n)
    rho = rotate_vector(np.eye(n, dtype=np.int64), n, r).T.astype(float)
    return B @ rho @ B.T


def orbit_eperp_diameter(vertices: np.ndarray, n: int) -> float:
    """E_0-orthogonal diameter of the union of the 2n rotated copies of a vertex set.

    The star of narrow rhombi is the rotation orbit of one of its tiles, so
    this is the window of sigma^k(S_n) given sigma^k of a single star tile.
    """
    idx = _eperp_indices(n)
    return _orbit_diameter((vertices.astype(float) @ real_basis(n).T)[:, idx], n, idx)


def _orbit_diameter(y: np.ndarray, n: int, idx: list[int]) -> float:
    """Diameter of the 2n rotated copies of points given in the basis rows ``idx``."""
    h = _hull_points(y)
    copies = []
    for r in range(2 * n):
        R = rotation_action(n, r)[np.ix_(idx, idx)]
        copies.append(h @ R.T)
    return point_diameter(np.concatenate(copies))


@dataclass
class SubspaceSeries:
    name: str
    modulus: float
    diameters: list[float] = field(default_factory=list)  # max over prototiles of diam(sigma^k(t)), k = 0, 1, ...

    @property
    def delta(self) -> float:
        return self.diameters[1] if len(self.diameters) > 1 else math.nan

    @property
    def ratios(self) -> list[float]:
        d = self.diameters
        return [d[k + 1] / d[k] if d[k] > 0 else math.inf for k in range(len(d) - 1)]

    def recursive_slack(self) -> list[float]:
        """Bound minus measured value for diam(k+1) <= |lambda| diam(k) + 2 delta, k >= 1."""
        d = self.diameters
        return [self.modulus * d[k] + 2 * self.delta - d[k + 1] for k in range(1, len(d) - 1)]

    @property
    def bound(self) -> float | None:
        """Limit 2 delta / (1 - |lambda|) for contracting subspaces."""
        if self.modulus >= 1 or len(self.diameters) < 2:
            return None
        return 2 * self.delta / (1 - self.modulus)


@dataclass
class PlanarityReport:
    n: int
    edgeword: str
    k_max: int
    k_done: int
    moduli: list[float]
    subspaces: list[SubspaceSeries]
    window_diameters: list[float]
    window_bound: float | None
    verdict: str
    partial: bool = False
    window_exact: bool = True  # False: window_diameters are upper bounds from the per-subspace windows
    note: str = (
        "diameters are those of the projected vertex sets; a diameter bounds twice "
        "the thickness around the best affine plane"
    )

    def series(self, name: str) -> SubspaceSeries:
        for s in self.subspaces:
            if s.name == name:
                return s
        raise KeyError(name)

    def recursive_ok(self, slack: float = 1e-6) -> bool:
        return all(v >= -slack for s in self.subspaces if s.name != "E0" for v in s.recursive_slack())

    def to_json(self) -> dict:
        d = asdict(self)
        for s, raw in zip(self.subspaces, d["subspaces"]):
            raw["ratios"] = s.ratios
            raw["bound"] = s.bound
        return d

    @classmethod
    def from_json(cls, data: dict) -> "PlanarityReport":
        subs = [
            SubspaceSeries(s["name"], float(s["modulus"]), [float(x) for x in s["diameters"]])
            for s in data["subspaces"]
        ]
        fields = {k: v for k, v in data.items() if k != "subspaces"}
        return cls(subspaces=subs, **fields)


def seed_tiles(n: int) -> list[Patch]:
    """One tile per rotation class; the narrow class uses a tile of the star."""
    seeds = []
    origin = np.zeros(n, dtype=np.int64)
    for j, k in representatives(n):
        if tile_class(j, k, n) == 1:
            seeds.append(Patch.from_tiles(n, [tile_from_edges(origin, 0, 1, n)]))
        else:
            seeds.append(Patch.from_tiles(n, [tile_from_edges(origin, 2 * j, 2 * k, n)]))
    return seeds


class _Propagator:
    """Projected hull points of sigma(p) computed from the tiles of p.

    The vertices of sigma(p) are the union over tiles s of M a_s plus the
    vertices of the metatile of s, so the hull of their projection only needs
    the hull of each projected metatile.  This gives level k + 1 exactly while
    holding level k in memory.
    """

    def __init__(self, rule: SubstitutionRule, rows: list[int]):
        self.rule = rule
        self.B = real_basis(rule.n)[rows]
        self.hulls = {t: _hull_points(m.vertices().astype(float) @ self.B.T) for t, m in rule.metatiles.items()}

    def image_points(self, p: Patch, max_points: int = 200_000) -> np.ndarray:
        images = (p.anchors @ self.rule.matrix.T).astype(float) @ self.B.T
        out = []
        for t, h in self.hulls.items():
            sel = np.nonzero((p.types[:, 0] == t[0]) & (p.types[:, 1] == t[1]))[0]
            chunk = max(1, max_points // len(h))
            for s in range(0, len(sel), chunk):
                pts = (images[sel[s : s + chunk]][:, None, :] + h[None]).reshape(-1, h.shape[1])
                out.append(_hull_points(pts))
        return _hull_points(np.concatenate(out))


def planarity_report(
    rule: SubstitutionRule,
    k_max: int,
    budget: int = TILE_BUDGET,
    eps: float = 0.5,
    slack: float = 1e-6,
) -> PlanarityReport:
    """Measure diam_E(sigma^k(t)) for every subspace and prototile class, k <= k_max.

    Level k is measured from the tiles of level k - 1, so only
    sigma^(k_max - 1) is ever built.  The star window V(sigma^k(S_n)) comes
    from the rotation orbit of sigma^k of one star tile.  If the budget runs
    out the report is marked partial and covers the completed levels.
    """
    if k_max < 1:
        raise ValidationError("k_max must be at least 1")
    n = rule.n
    eig = eigenvalues(n, abelianize(rule.edgeword))
    moduli = [float(m) for m in eig.moduli]
    subs = [SubspaceSeries("delta", 0.0)] + [SubspaceSeries(f"E{j}", moduli[j]) for j in range(n // 2)]
    rows = {"delta": [0]}
    for j in range(n // 2):
        rows[f"E{j}"] = [1 + 2 * j, 2 + 2 * j]
    props = {name: _Propagator(rule, r) for name, r in rows.items()}
    idx = _eperp_indices(n)
    # the full window is cheap to measure exactly up to three dimensions; above
    # that it is bounded by combining the per-subspace windows
    exact = len(idx) <= 3
    window_prop = _Propagator(rule, idx) if exact else None
    seeds = seed_tiles(n)
    narrow = next(i for i, (j, k) in enumerate(representatives(n)) if tile_class(j, k, n) == 1)
    window: list[float] = []

    def record(points: dict[str, list[np.ndarray]], perp) -> None:
        for s in subs:
            s.diameters.append(max(point_diameter(a) for a in points[s.name]))
        if exact:
            window.append(_orbit_diameter(perp(), n, idx))
        else:
            parts = [_orbit_diameter(points[name][narrow], n, r) for name, r in rows.items() if name != "E0"]
            window.append(math.sqrt(sum(d * d for d in parts)))

    B = real_basis(n)
    y = [p.vertices().astype(float) @ B.T for p in seeds]
    points = {name: [a[:, r] for a in y] for name, r in rows.items()}
    record(points, lambda: y[narrow][:, idx])
    k_done = 0
    partial = False
    current = seeds
    for k in range(1, k_max + 1):
        if k > 1:
            try:
                current = [apply(rule, p, budget) for p in current]
            except BudgetExceeded:
                partial = True
                break
        points = {name: [pr.image_points(p) for p in current] for name, pr in props.items()}
        record(points, lambda: window_prop.image_points(current[narrow]))
        k_done = k
    if k_done < 1:
        raise BudgetExceeded("budget exhausted before the first iteration")

    others = [s for s in subs if s.name != "E0"]
    bound = None
    if all(s.bound is not None for s in others):
        bound = float(sum(s.bound for s in others))
    report = PlanarityReport(
        n, format_edgeword(rule.edgeword), k_max, k_done, moduli, subs, window, bound, "", partial, exact
    )

    if eig.planar() and report.recursive_ok(slack) and bound is not None and max(window) <= bound + slack:
        report.verdict = "planar-consistent"
    elif any(
        s.modulus > 1 and s.ratios and s.ratios[-1] >= s.modulus - eps for s in subs if s.name not in ("E0", "delta")
    ):
        report.verdict = "non-planar-evidence"
    else:
        report.verdict = "inconclusive"
    return report
