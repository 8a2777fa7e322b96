from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rosa.billiard import candidate_edgeword, find_planar_candidate
from rosa.edgeword import (
    INF,
    Edgeword,
    abelianize,
    check_k1_counting,
    counting,
    counting_inverse,
    derived_counting_conditions,
    format_edgeword,
    is_almost_balanced,
    parse_edgeword,
    random_palindrome,
    subrosa_edgeword,
)
from rosa.errors import ValidationError
from rosa.kenyon import metatile_polygon, unique_matching, verify_matching
from rosa.lattice import tile_class



def brute_balanced(u: Edgeword, k: int) -> bool:
    letters = u.letters
    for a in range(len(letters)):
        for b in range(a + 1, len(letters) + 1):
            v = letters[a:b]
            for j1 in range(1, u.n - 1, 2):
                for j2 in range(j1 + 2, u.n - 1, 2):
                    if v.count(j1) - v.count(j2) < -k:
                        return False
    return True


def test_parse_and_format():
    u = parse_edgeword("131131", 5)
    assert u.letters == (1, 3, 1, 1, 3, 1)
    assert format_edgeword(u) == "131131"
    w = parse_edgeword("1.11.3.3.11.1", 13)
    assert w.letters == (1, 11, 3, 3, 11, 1)
    assert format_edgeword(w) == "1.11.3.3.11.1"


@pytest.mark.parametrize("text,n", [("", 5), ("1a1", 5), ("151", 5), ("121", 5), ("1", 4)])
def test_parse_rejects(text, n):
    with pytest.raises(ValidationError):
        parse_edgeword(text, n)


def test_edgeword_basics():
    u = parse_edgeword("135131131531", 7)
    assert u.is_palindrome()
    assert not parse_edgeword("13", 5).is_palindrome()
    assert parse_edgeword("131131", 5).is_palindrome()
    assert u.reversed().letters == u.letters[::-1]
    assert (parse_edgeword("13", 5) + parse_edgeword("31", 5)).letters == (1, 3, 3, 1)
    assert parse_edgeword("131131", 5).alphabet == (1, 3)


@pytest.mark.parametrize("n,want", [(5, "131131"), (7, "135131131531"), (9, "13571315311351317531")])
def test_subrosa_edgewords(n, want):
    assert format_edgeword(subrosa_edgeword(n)) == want


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11, 13, 15])
def test_subrosa_abelianization(n):
    # abelianized Sub Rosa edgeword is (n-1, n-3, ..., 2)
    assert abelianize(subrosa_edgeword(n)).tolist() == list(range(n - 1, 1, -2))


def test_abelianize():
    assert abelianize(parse_edgeword("131131", 5)).tolist() == [4, 2]
    assert abelianize(Edgeword(7, ())).tolist() == [0, 0, 0]


def test_counting_examples():
    u = parse_edgeword("131131", 5)
    assert counting(u, 1, 3) == 2
    assert counting(u, 3, 4) == 1
    assert all(counting(u, 5, x) == 0 for x in range(7))
    # letters beyond n count negatively
    assert counting(u, 7, 6) == -counting(u, 3, 6)
    assert counting_inverse(u, 1, 2) == 3
    assert counting_inverse(u, 3, 5) == INF
    assert counting_inverse(u, 1, 0) == 0
    assert counting_inverse(u, 3, -1) == -INF
    with pytest.raises(ValidationError):
        counting(u, 2, 1)
    with pytest.raises(ValidationError):
        counting(u, 1, 7)
    with pytest.raises(ValidationError):
        counting_inverse(u, 5, 1)


@given(st.lists(st.sampled_from([1, 3, 5]), min_size=1, max_size=20), st.sampled_from([1, 3, 5]))
def test_counting_inverse_inverts(letters, j):
    u = Edgeword(7, tuple(letters))
    for y in range(1, len(letters) + 2):
        x = counting_inverse(u, j, y)
        if x == INF:
            assert counting(u, j, len(u)) < y
        else:
            assert counting(u, j, x) == y
            assert counting(u, j, x - 1) == y - 1


def test_balance_examples():
    assert is_almost_balanced(parse_edgeword("131131", 5), 2).ok
    rep = is_almost_balanced(parse_edgeword("333", 5), 2)
    assert not rep.ok
    assert rep.factor(parse_edgeword("333", 5)).letters == (3, 3, 3)
    w = parse_edgeword("3333355", 7)
    assert is_almost_balanced(w, len(w)).ok


@given(st.sampled_from([5, 7, 9]).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.sampled_from(range(1, n - 1, 2)), min_size=1, max_size=14))), st.integers(0, 3))
@settings(max_examples=150)
def test_balance_matches_factor_enumeration(args, k):
    n, letters = args
    u = Edgeword(n, tuple(letters))
    rep = is_almost_balanced(u, k)
    assert rep.ok == brute_balanced(u, k)
    if not rep.ok:
        v = rep.factor(u)
        j1, j2 = rep.letters
        assert v.letters.count(j1) - v.letters.count(j2) < -k


def test_k1_counting_examples():
    assert check_k1_counting(parse_edgeword("131131", 5)).ok
    rep = check_k1_counting(parse_edgeword("311113", 5))
    assert not rep.ok
    # the first violation sits at the first 1, right after the leading 3
    assert rep.first.position == 2
    assert check_k1_counting(parse_edgeword("1", 5)).ok


def test_derived_counting_examples():
    s5 = parse_edgeword("131131", 5)
    assert derived_counting_conditions(s5, 1).ok
    assert derived_counting_conditions(s5, 2).ok
    bad = parse_edgeword("311113", 5)
    assert not check_k1_counting(bad).ok
    assert any(not derived_counting_conditions(bad, k).ok for k in range(1, 5))
    with pytest.raises(ValidationError):
        derived_counting_conditions(s5, 5)


def _candidates():
    for n in (5, 7, 9, 11):
        for j in range(1, 60):
            yield candidate_edgeword(n, j)


def test_k1_extends_to_every_corner_on_candidates():
    checked = 0
    for u in _candidates():
        if check_k1_counting(u).ok:
            checked += 1
            for k in range(1, u.n):
                assert derived_counting_conditions(u, k).ok, (format_edgeword(u), k)
    assert checked > 50


def _all_letters_with_strict_counts(u: Edgeword) -> bool:
    ab = abelianize(u)
    return bool(np.all(ab > 0) and np.all(ab[:-1] > ab[1:]))


def test_k1_extends_adjacent_on_random_palindromes():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(600):
        n = int(rng.choice([5, 7, 9]))
        u = random_palindrome(n, int(rng.integers(n // 2, 8)), rng)
        if set(u.letters) != set(range(1, n - 1, 2)) or not check_k1_counting(u).ok:
            continue
        checked += 1
        for k in range(1, n):
            rep = derived_counting_conditions(u, k)
            assert not [v for v in rep.violations if v.family.startswith("adjacent")]
    assert checked > 20


def test_balanced_gives_opposite_on_candidates():
    checked = 0
    for u in _candidates():
        if is_almost_balanced(u, 2).ok and _all_letters_with_strict_counts(u) and check_k1_counting(u).ok:
            checked += 1
            for k in range(1, u.n):
                rep = derived_counting_conditions(u, k)
                assert not [v for v in rep.violations if v.family.startswith("opposite")]
    assert checked > 20


def test_balanced_palindrome_can_break_opposite_inequality():
    # corner-tileable and 2-almost-balanced, yet the narrow metatile is not tileable
    u = parse_edgeword("13153111135131", 7)
    assert check_k1_counting(u).ok
    rep = derived_counting_conditions(u, 1)
    assert {v.family for v in rep.violations} == {"opposite2"}
    b = metatile_polygon(u, 0, 3)
    assert tile_class(0, 3, 7) == 1
    assert not verify_matching(b, unique_matching(b)).ok


def _words(rng, count):
    for _ in range(count):
        n = int(rng.choice([5, 7, 9]))
        yield random_palindrome(n, int(rng.integers(1, 7)), rng)
    for n in (5, 7, 9, 11):
        yield subrosa_edgeword(n)
        yield find_planar_candidate(n).edgeword


def test_matching_implies_counting():
    rng = np.random.default_rng(5)
    for u in _words(rng, 150):
        for d in range(1, u.n // 2 + 1):
            b = metatile_polygon(u, 0, d)
            if verify_matching(b, unique_matching(b)).ok:
                assert derived_counting_conditions(u, tile_class(0, d, u.n)).ok, (format_edgeword(u), d)


@pytest.mark.parametrize("source", ["subrosa", "planar"])
@pytest.mark.parametrize("n", [5, 7, 9, 11])
def test_matching_equals_counting(source, n):
    u = subrosa_edgeword(n) if source == "subrosa" else find_planar_candidate(n).edgeword
    for d in range(1, n // 2 + 1):
        b = metatile_polygon(u, 0, d)
        t = tile_class(0, d, n)
        assert verify_matching(b, unique_matching(b)).ok == derived_counting_conditions(u, t).ok
        assert derived_counting_conditions(u, t).ok


def test_single_letter_word_is_not_covered_by_counting():
    # no pair of distinct letters, so every inequality is vacuous; the wide metatile still fails
    u = parse_edgeword("11", 5)
    assert check_k1_counting(u).ok
    b = metatile_polygon(u, 0, 1)
    assert not verify_matching(b, unique_matching(b)).ok


def test_random_palindrome():
    rng = np.random.default_rng(0)
    w = random_palindrome(9, 5, rng)
    assert len(w) == 10 and w.is_palindrome()
    assert set(w.letters) <= {1, 3, 5, 7}
