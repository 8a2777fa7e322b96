from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import ConvexHull
from scipy.spatial.distance import pdist

from rosa.errors import ValidationError
from rosa.lattice import Patch, Tile, rotate_patch, star_patch
from rosa.planarity import (
    PlanarityReport,
    eperp_diameter,
    orbit_eperp_diameter,
    planarity_report,
    point_diameter,
    real_basis,
    rotation_action,
    seed_tiles,
    spectral_coords,
    subspace_diameters,
    subspace_names,
)
from rosa.substitution import iterate


def rows_of(n, name):
    if name == "delta":
        return [0]
    j = int(name[1:])
    return [1 + 2 * j, 2 + 2 * j]


def brute_diameter(vertices, n, rows):
    y = np.unique(vertices, axis=0).astype(float) @ real_basis(n)[rows].T
    if len(y) < 2:
        return 0.0
    if y.shape[1] == 1:
        return float(np.ptp(y))
    # the farthest pair sits on the convex hull
    y = y[ConvexHull(y).vertices]
    return float(pdist(y).max())


def test_spectral_examples():
    s = spectral_coords(np.ones(5), 5)
    assert s.delta == pytest.approx(math.sqrt(5))
    assert np.allclose(s.e, 0)
    s = spectral_coords([1, 0, 0, 0, 0], 5)
    assert s.delta == pytest.approx(1 / math.sqrt(5))
    assert np.allclose(s.e, math.sqrt(2 / 5))
    with pytest.raises(ValidationError):
        spectral_coords([1, 2], 5)


@given(
    st.sampled_from([5, 7, 9, 11]).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.integers(-50, 50), min_size=n, max_size=n),
            st.lists(st.integers(-50, 50), min_size=n, max_size=n),
        )
    )
)
def test_spectral_linear_and_isometric(args):
    n, a, b = args
    a, b = np.array(a), np.array(b)
    sa, sb, sab = spectral_coords(a, n), spectral_coords(b, n), spectral_coords(a + b, n)
    assert sab.delta == pytest.approx(sa.delta + sb.delta, abs=1e-9)
    assert np.allclose(sab.e, sa.e + sb.e, atol=1e-9)
    assert sa.norm2() == pytest.approx(float(a @ a), abs=1e-8)


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11, 13])
def test_real_basis_orthogonal(n):
    B = real_basis(n)
    assert np.allclose(B @ B.T, np.eye(n), atol=1e-12)
    assert subspace_names(n)[:2] == ["delta", "E0"]


@pytest.mark.parametrize("n", [5, 7, 9])
def test_rotation_acts_blockwise(n):
    R = rotation_action(n, 1)
    assert np.allclose(R @ R.T, np.eye(n), atol=1e-12)
    assert np.allclose(np.linalg.matrix_power(R, 2 * n), np.eye(n), atol=1e-9)
    for j in range(n // 2):
        rows = [1 + 2 * j, 2 + 2 * j]
        others = [i for i in range(n) if i not in rows]
        assert np.allclose(R[np.ix_(rows, others)], 0, atol=1e-12)
    assert R[0, 0] == pytest.approx(-1)


def test_diameters_small():
    assert point_diameter(np.zeros((1, 3))) == 0
    t = Patch.from_tiles(5, [Tile((0,) * 5, 0, 1)])
    rep = eperp_diameter(t)
    v = t.vertices()
    B = real_basis(5)[[0, 3, 4]]
    assert rep.total == pytest.approx(float(pdist(v @ B.T).max()))
    for name in ("delta", "E0", "E1"):
        assert rep.per_subspace[name] == pytest.approx(brute_diameter(v, 5, rows_of(5, name)))


def test_star_diameter_rotation_invariant():
    s = star_patch(5)
    d = eperp_diameter(s)
    for r in range(1, 10):
        e = eperp_diameter(rotate_patch(s, r))
        assert e.total == pytest.approx(d.total, abs=1e-9)
    assert orbit_eperp_diameter(seed_tiles(5)[1].vertices(), 5) == pytest.approx(d.total, abs=1e-9)


def test_subspace_diameters_rejects_empty():
    with pytest.raises(ValidationError):
        eperp_diameter(Patch(5))


def test_subrosa5_report(subrosa5):
    rep = planarity_report(subrosa5, 3)
    assert rep.verdict == "planar-consistent"
    assert rep.k_done == 3 and not rep.partial and rep.window_exact
    e1 = rep.series("E1")
    assert e1.diameters == pytest.approx([1.2030, 3.6102, 6.2161, 8.1123], abs=1e-3)
    assert rep.series("delta").diameters == pytest.approx([0.894, 1.789, 1.789, 1.789], abs=1e-3)
    assert all(v >= -1e-6 for v in e1.recursive_slack())
    assert max(rep.window_diameters) <= rep.window_bound
    assert rep.window_bound == pytest.approx(74.40, abs=0.01)


def test_report_matches_materialised_image(subrosa5):
    rep = planarity_report(subrosa5, 2)
    seeds = seed_tiles(5)
    for name in ("delta", "E0", "E1"):
        for k in (0, 1, 2):
            want = max(brute_diameter(iterate(subrosa5, s, k).vertices(), 5, rows_of(5, name)) for s in seeds)
            assert rep.series(name).diameters[k] == pytest.approx(want, rel=1e-9, abs=1e-9)
    star2 = iterate(subrosa5, star_patch(5), 2)
    assert rep.window_diameters[2] == pytest.approx(brute_diameter(star2.vertices(), 5, [0, 3, 4]), rel=1e-9)


def test_subrosa7_grows(subrosa7):
    rep = planarity_report(subrosa7, 3)
    assert rep.verdict == "non-planar-evidence"
    e1 = rep.series("E1")
    assert e1.modulus == pytest.approx(2.01, abs=0.01)
    assert e1.diameters == pytest.approx([1.0422, 6.1606, 17.3438, 38.969], abs=1e-3)
    # the ratio settles toward |lambda_1| from above
    r = e1.ratios
    assert r[0] > r[1] > r[2] > e1.modulus
    assert r[2] == pytest.approx(e1.modulus, rel=0.25)
    assert rep.window_bound is None


def test_subrosa7_matches_materialised_image(subrosa7):
    rep = planarity_report(subrosa7, 2)
    for k in (1, 2):
        want = max(brute_diameter(iterate(subrosa7, s, k).vertices(), 7, rows_of(7, "E1")) for s in seed_tiles(7))
        assert rep.series("E1").diameters[k] == pytest.approx(want, rel=1e-9)


def test_planar7_report(planar7):
    rep = planarity_report(planar7, 2)
    assert rep.verdict == "planar-consistent"
    assert not rep.window_exact
    assert rep.recursive_ok()


def test_partial_on_budget(subrosa5):
    rep = planarity_report(subrosa5, 3, budget=2_000)
    assert rep.partial and rep.k_done == 2


def test_report_json_roundtrip(subrosa5):
    rep = planarity_report(subrosa5, 2)
    back = PlanarityReport.from_json(rep.to_json())
    assert back.verdict == rep.verdict
    assert back.series("E1").diameters == rep.series("E1").diameters
    assert back.window_diameters == rep.window_diameters


def test_rejects_zero_levels(subrosa5):
    with pytest.raises(ValidationError):
        planarity_report(subrosa5, 0)
