import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramsey_exp import counterexample as cx
from ramsey_exp.scale import Order, ScaleValue, sv_pow


def test_minimal_two_levels():
    t = cx.generate(2)
    assert [(lv.x.exact, lv.y.exact) for lv in t.levels] == [(3, 3), (28, 84)]
    assert t.strategy == "minimal"
    assert not cx.failures(cx.verify_conditions(t))


def test_minimal_three_levels_exact():
    t = cx.generate(3)
    x3, y3 = t.levels[2].x, t.levels[2].y
    assert x3.exact == 84**84 + 1
    assert y3.exact == (84**84 + 1) * 84
    assert y3.exact.bit_length() == 544
    assert not cx.failures(cx.verify_conditions(t))


def test_minimal_four_levels_log_domain():
    t = cx.generate(4)
    x4 = t.levels[3].x
    assert not x4.is_exact
    y3 = t.levels[2].y.exact
    # log2 x4 is just above y3 * log2 y3
    assert y3 * 543 < x4.lo and x4.hi < y3 * 544 + 1
    rep = cx.verify_conditions(t)
    assert not cx.failures(rep)
    assert all(c.order != Order.INDETERMINATE for c in rep)
    assert all(c.order == Order.LESS for c in rep if "<" in c.condition)


def test_five_levels_out_of_range():
    with pytest.raises(OverflowError):
        cx.generate(5)


def test_tampered_towers_named():
    with pytest.raises(cx.ConditionViolation) as e:
        cx.from_pairs([(3, 3), (28, 800)])
    assert e.value.level == 2 and e.value.condition == "y_n<x_n^2"
    with pytest.raises(cx.ConditionViolation) as e:
        cx.from_pairs([(3, 3), (27, 81)])
    assert e.value.condition == "y_{n-1}^y_{n-1}<x_n" and e.value.order == Order.EQUAL
    with pytest.raises(cx.ConditionViolation) as e:
        cx.from_pairs([(2, 2)])
    assert e.value.condition == "x_1>2"


def test_report_lists_every_failure():
    t = cx.from_pairs([(3, 3), (28, 800)], validate=False)
    names = {c.condition for c in cx.failures(cx.verify_conditions(t))}
    assert names == {"y_n<x_n^2", "y_n=x_n*y_{n-1}"}


def test_membership():
    t = cx.generate(4)
    assert cx.membership(t, 30) == cx.IN
    assert cx.membership(t, 4) == cx.OUT
    assert cx.membership(t, 3) == cx.IN
    assert cx.membership(t, 84**84 + 1) == cx.IN
    assert cx.membership(t, 84**85) == cx.IN
    assert cx.membership(t, 85 * 84**84) == cx.OUT
    assert cx.membership(t, t.levels[3].y) == cx.IN
    assert cx.membership(t, sv_pow(t.levels[2].y, t.levels[2].y)) == cx.OUT


def test_membership_indeterminate_is_reported():
    t = cx.from_pairs([(ScaleValue.log_bounds(10, 11), ScaleValue.log_bounds(12, 13))], validate=False)
    assert cx.membership(t, ScaleValue.log_bounds(10, 12)) == cx.INDETERMINATE


def test_no_triple_minimal():
    t = cx.generate(4)
    assert cx.members_upto(t, 10**4) == [3, *range(28, 85)]
    assert cx.brute_check_no_triple(t, 10**4) is None
    assert cx.brute_check_no_triple(t, 1) is None


def test_no_triple_catches_violation():
    t = cx.from_pairs([(2, 4), (16, 16)], validate=False)
    assert cx.brute_check_no_triple(t, 100) == (2, 4)


def test_no_triple_pairs_against_bignum():
    # every pair the prefilter skips is also out by direct membership
    t = cx.generate(3)
    elems = cx.members_upto(t, 200)
    for x in elems:
        for y in elems:
            if x != y:
                v = x**y
                inside = any(lv.x.exact <= v <= lv.y.exact for lv in t.levels)
                assert not inside


def test_mult_thick_witness():
    t = cx.generate(4)
    assert cx.mult_thick_witness(t, 3) == 2
    assert cx.mult_thick_witness(t, 1) == 1
    assert cx.mult_thick_witness(t, 84) == 3
    assert cx.mult_thick_witness(t, 85) == 4
    assert cx.mult_thick_witness(t, 10**100) == 4
    with pytest.raises(cx.InsufficientLevels):
        cx.mult_thick_witness(cx.generate(2), 4)


def test_interval_lengths_grow():
    t = cx.generate(3, x1=5, offsets=[3, 7])
    lens = [lv.y.exact - lv.x.exact for lv in t.levels]
    assert all(a < b for a, b in zip(lens[1:], lens[2:]))
    t = cx.generate(4)
    assert cx.sv_compare(cx.sv_mul(t.levels[3].y, 1), t.levels[2].y) == Order.GREATER


def test_serialization_roundtrip():
    t = cx.generate(4)
    d = cx.tower_to_dict(t)
    assert d["levels"][3]["x_expr"] == "pow(y3,y3)+1"
    assert d["levels"][1]["x"] == "28"
    assert d["levels"][3]["x"].startswith("log2:[")
    back = cx.tower_from_dict(json.loads(json.dumps(d)))
    assert cx.tower_to_dict(back) == d
    d["levels"][1]["y"] = "85"
    with pytest.raises(ValueError):
        cx.tower_from_dict(d)


def test_perturbed_towers_verify_and_stay_clean():
    rng = random.Random(11)
    for _ in range(20):
        x1 = rng.choice([3, 4])
        offs = [rng.randint(0, 40), rng.randint(0, 10**6)]
        t = cx.generate(3, x1=x1, offsets=offs)
        assert not cx.failures(cx.verify_conditions(t))
        assert cx.brute_check_no_triple(t, 2000) is None


@settings(max_examples=300, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 3000), st.integers(0, 3000)), min_size=1, max_size=4), st.integers(1, 80))
def test_brute_check_matches_naive(raw, cap):
    pairs, lo = [], 0
    for start, width in raw:
        x = lo + start
        pairs.append((x, x + width))
        lo = x + width + 1
    t = cx.from_pairs(pairs, validate=False)
    inside = lambda v: any(a <= v <= b for a, b in pairs)
    elems = [v for v in range(2, cap + 1) if inside(v)]
    want = next(((x, y) for x in elems for y in elems if x != y and inside(x**y)), None)
    assert cx.brute_check_no_triple(t, cap) == want
