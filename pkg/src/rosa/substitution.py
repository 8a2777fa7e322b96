"""Vertex-hierarchic substitutions built from a palindromic edgeword.

The image of tile (x, j, k) is M x plus the metatile of type (j, k): the four
edge necklaces and a rhombus tiling of what remains inside.  Metatiles are
tiled once per rotation class (representatives (0, d), d <= n // 2) and the
other types are obtained by rotating them, which makes the rule commute with
rotation by pi / n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circulant import eigenvalues, expansion_matrix
from .edgeword import Edgeword, abelianize, format_edgeword, parse_edgeword
from .errors import BudgetExceeded, ValidationError
from .kenyon import (
    TilingOutcome,
    metatile_polygon,
    necklace_tiles,
    tile_polygon,
)
from .lattice import Patch, Tile, check_n, fills_polygon, rotate_patch, star_patch, validate_patch

TILE_BUDGET = 2_000_000


class Untileable(ValidationError):
    """A metatile interior admits no rhombus tiling."""


def all_types(n: int) -> list[tuple[int, int]]:
    return [(j, k) for j in range(n) for k in range(j + 1, n)]


def representatives(n: int) -> list[tuple[int, int]]:
    return [(0, d) for d in range(1, n // 2 + 1)]


def _rotation_to(n: int, rep: tuple[int, int], target: tuple[int, int]) -> tuple[int, np.ndarray] | None:
    """Smallest r with rho^r (0, rep) of type ``target``, with the rotated anchor."""
    single = Patch.from_tiles(n, [Tile((0,) * n, *rep)])
    for r in range(2 * n):
        t = next(iter(rotate_patch(single, r)))
        if (t.j, t.k) == target:
            return r, np.array(t.anchor, dtype=np.int64)
    return None


@dataclass
class SubstitutionRule:
    edgeword: Edgeword
    matrix: np.ndarray
    interiors: dict[tuple[int, int], Patch]
    metatiles: dict[tuple[int, int], Patch] = field(default_factory=dict)
    methods: dict[tuple[int, int], str] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.edgeword.n

    def __post_init__(self):
        if not self.metatiles:
            self.metatiles = _derive_metatiles(self.edgeword, self.matrix, self.interiors)

    def expansion(self) -> complex:
        return complex(eigenvalues(self.n, abelianize(self.edgeword)).lambdas[0])

    def metatile(self, j: int, k: int) -> Patch:
        return self.metatiles[(j, k)]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "edgeword": format_edgeword(self.edgeword),
            "interiors": [
                {"j": j, "k": k, "tiles": self.interiors[(j, k)].to_json()["tiles"]}
                for (j, k) in sorted(self.interiors)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SubstitutionRule":
        try:
            n = check_n(data["n"])
            u = parse_edgeword(str(data["edgeword"]), n)
            interiors = {
                (int(e["j"]), int(e["k"])): Patch.from_json({"n": n, "tiles": e["tiles"]})
                for e in data["interiors"]
            }
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed rule JSON: {exc}") from exc
        if set(interiors) != set(representatives(n)):
            raise ValidationError("rule must list one interior per rotation class")
        for rep, inner in interiors.items():
            if not fills_polygon(inner, metatile_polygon(u, *rep)):
                raise ValidationError(f"interior {rep} does not fill its metatile polygon")
        rule = cls(u, expansion_matrix(n, abelianize(u)), interiors)
        for key, p in rule.metatiles.items():
            rep = validate_patch(p)
            if not rep.ok:
                raise ValidationError(f"metatile {key} is not a valid patch: {rep.violations}")
        return rule


def _derive_metatiles(u: Edgeword, M: np.ndarray, interiors: dict) -> dict[tuple[int, int], Patch]:
    n = u.n
    base = {}
    for rep, inner in interiors.items():
        base[rep] = inner.union(Patch.from_tiles(n, necklace_tiles(u, *rep)))
    out = {}
    for target in all_types(n):
        for rep, patch in base.items():
            found = _rotation_to(n, rep, target)
            if found is None:
                continue
            r, anchor = found
            out[target] = rotate_patch(patch, r).translate(-(M @ anchor))
            break
    return out


def build_substitution(u: Edgeword, budget: int = 2_000_000) -> SubstitutionRule:
    """Tile the metatile interiors of u and assemble the rule.

    Raises Untileable if some interior has no tiling.
    """
    if not u.is_palindrome():
        raise ValidationError("substitution edgewords must be palindromes")
    n = u.n
    M = expansion_matrix(n, abelianize(u))
    interiors = {}
    methods = {}
    for rep in representatives(n):
        poly = metatile_polygon(u, *rep)
        outcome: TilingOutcome = tile_polygon(poly, budget=budget)
        if not outcome.tileable:
            raise Untileable(f"metatile {rep} of {format_edgeword(u)} is not tileable: {outcome.report.violations[:5]}")
        interiors[rep] = outcome.patch
        methods[rep] = outcome.method
    return SubstitutionRule(u, M, interiors, methods=methods)


def apply(rule: SubstitutionRule, patch: Patch, budget: int = TILE_BUDGET) -> Patch:
    """Image of a patch; tiles shared by adjacent metatiles are merged."""
    n = rule.n
    if patch.n != n:
        raise ValidationError(f"patch has n={patch.n}, rule has n={n}")
    if not len(patch):
        return Patch(n)
    M = rule.matrix
    keys, inverse = np.unique(patch.types, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    predicted = sum(int((inverse == i).sum()) * len(rule.metatiles[tuple(key)]) for i, key in enumerate(keys.tolist()))
    if predicted > budget:
        raise BudgetExceeded(f"image would hold up to {predicted} tiles, budget is {budget}")
    anchors, types = [], []
    images = patch.anchors @ M.T
    for i, key in enumerate(keys.tolist()):
        meta = rule.metatiles[tuple(key)]
        sel = images[inverse == i]
        a = (sel[:, None, :] + meta.anchors[None, :, :]).reshape(-1, n)
        anchors.append(a)
        types.append(np.tile(meta.types, (len(sel), 1)))
    return Patch(n, np.concatenate(anchors), np.concatenate(types))


def _image_chunks(rule: SubstitutionRule, patch: Patch, chunk_rows: int = 2_000_000):
    """Yield (anchors, types) blocks of sigma(patch) before deduplication."""
    M = rule.matrix
    n = rule.n
    keys, inverse = np.unique(patch.types, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    images = patch.anchors @ M.T
    for i, key in enumerate(keys.tolist()):
        meta = rule.metatiles[tuple(key)]
        sel = images[inverse == i]
        step = max(1, chunk_rows // max(1, len(meta)))
        for s in range(0, len(sel), step):
            part = sel[s : s + step]
            yield (
                (part[:, None, :] + meta.anchors[None, :, :]).reshape(-1, n),
                np.tile(meta.types, (len(part), 1)),
            )


def image_rotation_invariant(rule: SubstitutionRule, patch: Patch, r: int = 1, buckets: int = 32) -> tuple[bool, int]:
    """Exact test that sigma(patch) is invariant under rotation by r pi / n, and its size.

    The image is never held deduplicated in one piece.  Tiles are split by the
    sum of squares of their doubled centre, which rotation preserves, so each
    bucket has to be invariant on its own.
    """
    n = rule.n
    eye = np.eye(n, dtype=np.int64)
    store: list[list[tuple[np.ndarray, np.ndarray]]] = [[] for _ in range(buckets)]
    for anchors, types in _image_chunks(rule, patch):
        centre = 2 * anchors + eye[types[:, 0]] + eye[types[:, 1]]
        key = (centre * centre).sum(axis=1) % buckets
        for b in range(buckets):
            sel = key == b
            if sel.any():
                store[b].append((anchors[sel].astype(np.int32), types[sel].astype(np.int8)))
    ok, total = True, 0
    for b in range(buckets):
        if not store[b]:
            continue
        part = Patch(
            n,
            np.concatenate([a for a, _ in store[b]]).astype(np.int64),
            np.concatenate([t for _, t in store[b]]).astype(np.int64),
        )
        store[b] = []
        total += len(part)
        ok = ok and rotate_patch(part, r) == part
    return ok, total


def apply_tile(rule: SubstitutionRule, tile: Tile) -> Patch:
    return apply(rule, Patch.from_tiles(rule.n, [tile]))


def iterate(rule: SubstitutionRule, patch: Patch, k: int, budget: int = TILE_BUDGET) -> Patch:
    for _ in range(k):
        patch = apply(rule, patch, budget)
    return patch


def iterate_from_star(rule: SubstitutionRule, k: int, budget: int = TILE_BUDGET) -> Patch:
    """sigma^k of the star of 2n narrow rhombi."""
    return iterate(rule, star_patch(rule.n), k, budget)


@dataclass
class PrimitivityReport:
    """Primitivity orders of a rule.

    ``order`` only looks at the edge necklaces, so it depends on the edgeword
    alone and not on how the interiors were tiled.  ``full_order`` uses the
    whole metatiles and can be smaller.
    """

    order: int | None
    full_order: int | None
    types: list[tuple[int, int]]

    @property
    def primitive(self) -> bool:
        return self.full_order is not None


def presence_matrix(rule: SubstitutionRule, necklaces_only: bool = False) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """B[s, t] is true when type s occurs in the metatile (or its necklaces) of type t."""
    n = rule.n
    types = all_types(n)
    index = {t: i for i, t in enumerate(types)}
    B = np.zeros((len(types), len(types)), dtype=bool)
    for t in types:
        patch = Patch.from_tiles(n, necklace_tiles(rule.edgeword, *t)) if necklaces_only else rule.metatiles[t]
        for s in patch.type_counts():
            B[index[s], index[t]] = True
    return B, types


def _order(B: np.ndarray, k_max: int) -> int | None:
    power = B.copy()
    for k in range(1, k_max + 1):
        if power.all():
            return k
        power = (B.astype(np.int64) @ power.astype(np.int64)) > 0
    return None


def check_primitivity(rule: SubstitutionRule, k_max: int = 4) -> PrimitivityReport:
    """Smallest k <= k_max such that sigma^k of every tile holds every tile type.

    sigma^k(t) contains s exactly when the k-th boolean power of the presence
    matrix has entry (s, t) set, since sigma^k(t) is the union of the images
    of the tiles of sigma^(k-1)(t).
    """
    neck, types = presence_matrix(rule, necklaces_only=True)
    full, _ = presence_matrix(rule)
    return PrimitivityReport(_order(neck, k_max), _order(full, k_max), types)


def area_identity_residual(rule: SubstitutionRule, j: int, k: int) -> float:
    """area(metatile) - |lambda_0|^2 area(tile) - half the necklace area; zero up to rounding.

    Necklace rhombi straddle the image edge, so half of each lies outside.
    """
    n = rule.n
    meta = rule.metatile(j, k)
    neck = Patch.from_tiles(n, necklace_tiles(rule.edgeword, j, k))
    lam = abs(rule.expansion())
    tile_area = abs(math.sin(2 * math.pi * (k - j) / n))
    return meta.area() - lam**2 * tile_area - 0.5 * neck.area()
