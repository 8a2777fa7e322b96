from __future__ import annotations

import math
from collections import Counter

import numpy as np
import pytest

from rosa.circulant import eigenvalues
from rosa.edgeword import abelianize, parse_edgeword
from rosa.errors import BudgetExceeded, ValidationError
from rosa.lattice import Patch, Tile, rotate_patch, star_patch, tile_class, validate_patch
from rosa.substitution import (
    SubstitutionRule,
    Untileable,
    all_types,
    apply,
    apply_tile,
    area_identity_residual,
    build_substitution,
    check_primitivity,
    image_rotation_invariant,
    iterate,
    iterate_from_star,
    presence_matrix,
    representatives,
)


def class_counts(p: Patch) -> dict[int, int]:
    return dict(Counter(tile_class(j, k, p.n) for j, k in p.types.tolist()))


def test_types():
    assert len(all_types(5)) == 10
    assert representatives(5) == [(0, 1), (0, 2)]
    assert representatives(7) == [(0, 1), (0, 2), (0, 3)]


def test_subrosa5_metatiles(subrosa5):
    # interior counts plus 16 narrow and 8 wide necklace rhombi
    assert class_counts(subrosa5.metatile(0, 2)) == {1: 36, 3: 48}
    assert class_counts(subrosa5.metatile(0, 1)) == {1: 52, 3: 76}
    for t in all_types(5):
        assert validate_patch(subrosa5.metatile(*t)).ok
        assert area_identity_residual(subrosa5, *t) == pytest.approx(0, abs=1e-9)


def test_subrosa7_builds(subrosa7):
    for t in all_types(7):
        assert validate_patch(subrosa7.metatile(*t)).ok
        assert area_identity_residual(subrosa7, *t) == pytest.approx(0, abs=1e-8)


def test_untileable_edgeword():
    with pytest.raises(Untileable):
        build_substitution(parse_edgeword("311113", 5))
    with pytest.raises(ValidationError):
        build_substitution(parse_edgeword("13", 5))


def test_edgeword_missing_top_letter_is_flagged():
    with pytest.raises(Untileable):
        build_substitution(parse_edgeword("131131", 7))


def test_rotated_metatiles_agree(subrosa5):
    # the metatile of rho(t) is rho applied to the metatile of t
    for j, k in all_types(5):
        t = Tile((0,) * 5, j, k)
        rotated = rotate_patch(apply_tile(subrosa5, t), 1)
        r = rotate_patch(Patch.from_tiles(5, [t]), 1)
        (u,) = list(r)
        assert apply_tile(subrosa5, u) == rotated


def test_apply_single_tile(subrosa5):
    p = apply_tile(subrosa5, Tile((0,) * 5, 0, 2))
    assert class_counts(p) == {1: 36, 3: 48}
    q = apply_tile(subrosa5, Tile((1, 0, 0, 0, 0), 0, 2))
    assert q == p.translate(subrosa5.matrix @ np.array([1, 0, 0, 0, 0]))


def test_apply_is_functorial(subrosa5):
    s = star_patch(5)
    assert iterate(subrosa5, s, 2) == apply(subrosa5, apply(subrosa5, s))
    assert iterate(subrosa5, s, 0) == s


def test_star_at_centre(subrosa5):
    image = apply(subrosa5, star_patch(5))
    assert star_patch(5).tile_set() <= image.tile_set()
    assert validate_patch(image).ok


def test_iterates_nested(subrosa5):
    prev = star_patch(5)
    for k in range(1, 3):
        cur = iterate_from_star(subrosa5, k)
        assert prev.tile_set() <= cur.tile_set()
        prev = cur
    assert iterate_from_star(subrosa5, 0) == star_patch(5)


@pytest.mark.slow
def test_tile_count_growth(subrosa5):
    lam2 = abs(subrosa5.expansion()) ** 2
    s2 = iterate_from_star(subrosa5, 2)
    # the third iterate is counted without materialising it
    _, n3 = image_rotation_invariant(subrosa5, s2)
    assert len(s2) == 77120
    assert n3 / len(s2) == pytest.approx(lam2, rel=0.10)
    assert len(s2) / len(iterate_from_star(subrosa5, 1)) == pytest.approx(lam2, rel=0.10)


def test_budget(subrosa5):
    with pytest.raises(BudgetExceeded):
        iterate_from_star(subrosa5, 3, budget=1000)


def test_expansion(subrosa5):
    lam = subrosa5.expansion()
    assert abs(lam) == pytest.approx(eigenvalues(5, (4, 2)).moduli[0])
    assert np.angle(lam) == pytest.approx(-math.pi / 10)


def test_primitivity(subrosa5, planar7):
    rep = check_primitivity(subrosa5)
    assert rep.order == 2 and rep.primitive
    assert rep.full_order == 1
    assert check_primitivity(planar7).order == 2
    B, types = presence_matrix(subrosa5, necklaces_only=True)
    assert B.shape == (10, 10) and not B.all()


def test_rule_json_roundtrip(subrosa5):
    data = subrosa5.to_json()
    back = SubstitutionRule.from_json(data)
    assert back.metatiles == subrosa5.metatiles
    bad = dict(data, interiors=data["interiors"][:1])
    with pytest.raises(ValidationError):
        SubstitutionRule.from_json(bad)
    with pytest.raises(ValidationError):
        SubstitutionRule.from_json({"n": 5})


def test_rule_json_rejects_broken_interior(subrosa5):
    data = subrosa5.to_json()
    data["interiors"][0]["tiles"] = data["interiors"][0]["tiles"][1:]
    with pytest.raises(ValidationError):
        SubstitutionRule.from_json(data)


@pytest.mark.parametrize("k", [1, 2])
def test_image_rotation_invariance(subrosa5, k):
    p = iterate_from_star(subrosa5, k)
    assert rotate_patch(p, 1) == p
    ok, total = image_rotation_invariant(subrosa5, iterate_from_star(subrosa5, k - 1))
    assert ok and total >= len(p)


def test_bucketed_check_detects_asymmetry(subrosa5):
    p = star_patch(5)
    lopsided = Patch.from_tiles(5, list(p)[1:])
    ok, _ = image_rotation_invariant(subrosa5, lopsided)
    assert not ok
