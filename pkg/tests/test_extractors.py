import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from ramsey_exp.colorings import Coloring, IntWindowSet
from ramsey_exp.extractors import (
    FamilyTooLarge,
    PSCertificate,
    ThicknessInsufficient,
    ThresholdNotFound,
    bounded_polys,
    enumerate_PF,
    find_PF_monochromatic,
    ipr_star_check,
    main1_extract,
    parse_phi,
    pigeonhole_threshold,
    planted_ps_instance,
    replay_trace,
    vdw_return_set,
)
from ramsey_exp.patterns import SearchTruncated, make_witness, verify_witness
from ramsey_exp.scale import Polynomial, ScaleValue, poly_eval

W = IntWindowSet.from_iterable
P = Polynomial


def test_vdw_return_set_examples():
    assert vdw_return_set(IntWindowSet.full(9), [P((1,)), P((2,))], 4) == {1, 2, 3, 4}
    assert 2 in vdw_return_set(IntWindowSet.full(10), [P((0, 1))], 5)
    assert vdw_return_set(IntWindowSet.empty(10), [P((1,))], 5) == set()


def brute_return_set(mem, P, d_bound):
    out = set()
    for d in range(1, d_bound + 1):
        for a in mem:
            pts = [a + poly_eval(p, d) for p in P]
            if all(q in mem for q in pts):
                out.add(d)
                break
    return out


@settings(max_examples=150, deadline=None)
@given(
    st.integers(1, 500),
    st.data(),
    st.lists(st.lists(st.integers(-3, 3), min_size=1, max_size=3), min_size=1, max_size=3),
    st.integers(1, 50),
)
def test_vdw_return_set_matches_double_loop(N, data, coeffs, d_bound):
    mem = data.draw(st.sets(st.integers(1, N)))
    polys = [P(tuple(c)) for c in coeffs]
    assert vdw_return_set(W(N, mem), polys, d_bound) == brute_return_set(mem, polys, d_bound)


def test_ipr_star_examples():
    assert ipr_star_check(set(range(1, 13)), 2, 3) is None
    assert ipr_star_check(set(), 1, 1) == (1,)
    assert ipr_star_check({2, 4, 6}, 1, 3) == (1,)
    assert ipr_star_check({3}, 2, 3) is None
    assert ipr_star_check({3}, 2, 4) == (1, 4)


def avoiding_exists(k, M, Y):
    # every coloring of [M], first element fixed to 0 by symmetry
    for rest in itertools.product(range(k), repeat=M - 1):
        col = (0,) + rest
        if all(col[a - 1] != col[a + y - 1] for y in Y for a in range(1, M - y + 1)):
            return True
    return False


def brute_threshold(k, Y, cap):
    for M in range(1, cap + 1):
        if not avoiding_exists(k, M, Y):
            return M
    return None


def test_pigeonhole_examples():
    assert pigeonhole_threshold(1, {1}, 10).M == 2
    assert pigeonhole_threshold(1, {3}, 10).M == 4
    r = pigeonhole_threshold(2, {1, 2}, 10)
    assert r.M == brute_threshold(2, {1, 2}, 10) == 3
    assert pigeonhole_threshold(2, {2}, 30) is None


@pytest.mark.parametrize("k,Y", [(2, {1}), (2, {3, 5}), (3, {1, 2, 3}), (2, {1, 4}), (3, {2, 3, 4, 7}), (2, {1, 2})])
def test_pigeonhole_minimality(k, Y):
    r = pigeonhole_threshold(k, Y, 12)
    want = brute_threshold(k, Y, 12)
    if want is None:
        # e.g. odd differences only: the alternating coloring always avoids
        assert r is None
        return
    assert r.M == want
    # the search exhibits an avoiding coloring of [M-1]
    col = r.avoiding
    assert len(col) == r.M - 1
    assert all(col[a - 1] != col[a + y - 1] for y in Y for a in range(1, r.M - y))


def test_pigeonhole_sat_path_agrees():
    r = pigeonhole_threshold(3, {1, 2, 3}, 12, solver="pysat:cadical195")
    assert r.M == brute_threshold(3, {1, 2, 3}, 12)


def test_ps_certificate_validation():
    A = W(20, [2, 4, 6, 8])
    PSCertificate(A, (2,), W(20, [1, 2, 3, 4]))
    with pytest.raises(ValueError):
        PSCertificate(A, (2,), W(20, [1, 5]))


def test_extract_full_window():
    A = IntWindowSet.full(1000)
    cert = PSCertificate(A, (1,), A)
    w, trace = main1_extract(cert, 2)
    assert trace.M == 2
    c = Coloring(1, (0,) * 1000)
    assert verify_witness(w, c).valid
    assert replay_trace(cert, trace) == w
    steps = json.loads(trace.to_json())
    assert [s["step"] for s in steps] == ["threshold", "anchor", "labels", "pair", "witness"]


def test_extract_errors():
    A = W(10, [5, 6, 7, 8, 9, 10])
    with pytest.raises(ThresholdNotFound):
        main1_extract(PSCertificate(A, (1,), A), 2, M_cap=4)
    B = W(40, [1, 2, 3])
    with pytest.raises(ThicknessInsufficient):
        main1_extract(PSCertificate(B, (1,), B), 2)


def test_replay_detects_tampering():
    cert = planted_ps_instance(random.Random(5), 2)
    w, trace = main1_extract(cert, 2)
    trace.labels = [(l + 1) % len(cert.F) for l in trace.labels] if len(cert.F) > 1 else trace.labels
    trace.t += 1
    with pytest.raises(AssertionError):
        replay_trace(cert, trace)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([2, 3]))
def test_planted_extraction_verifies(seed, n):
    cert = planted_ps_instance(random.Random(seed), n)
    w, trace = main1_extract(cert, n)
    A = cert.A
    c = Coloring(2, tuple(0 if i in A else 1 for i in range(1, A.window_size + 1)))
    assert verify_witness(w, c).valid
    assert replay_trace(cert, trace) == w


def test_enumerate_pf_examples():
    assert enumerate_PF((7,), [P((1,))], [], 2).values == {ScaleValue.of(7)}
    assert enumerate_PF((1, 3), [P((1,))], [], 2).values == {ScaleValue.of(6)}
    assert enumerate_PF((2, 5), [P((1,)), P((2,))], [], 2).values == {ScaleValue.of(20), ScaleValue.of(80)}


def test_enumerate_pf_negative_sums_reported():
    fam = enumerate_PF((1, 3), [P((1,)), P((-2,))], [], 2)
    assert fam.values == {ScaleValue.of(6)}
    assert fam.negative == {(3, -2)}


def test_enumerate_pf_depth3_family():
    # f2(x) = 1: second exponent ranges over +-x2
    fam = enumerate_PF((2, 1, 5), [P((1,))], ["1"], 2)
    assert fam.values == {ScaleValue.of(5 * 2**1), ScaleValue.of(5 * 2**3)}


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.lists(st.integers(-2, 3), min_size=1, max_size=2), min_size=1, max_size=4),
    st.integers(1, 6),
    st.integers(1, 9),
    st.sampled_from([2, 3]),
)
def test_enumerate_pf_cardinality(F1, x1, x2, n):
    F1 = [P(tuple(c)) for c in F1]
    fam = enumerate_PF((x1, x2), F1, [], n)
    sums = [poly_eval(p, x1) for p in F1]
    assert len(fam.values) + len(fam.negative) <= len(F1)
    assert len(fam.values) + len(fam.negative) == len(set(sums))


def test_pf_search_examples():
    xs, w = find_PF_monochromatic(IntWindowSet.full(50), [P((1,))], [], 2, 2)
    assert xs == (1, 1) and w.span == (2,)
    evens = W(100, range(2, 101, 2))
    xs, w = find_PF_monochromatic(evens, [P((1,))], [], 2, 2)
    # only the family must be even; x2 = 1 already gives 1 * 2^1 = 2
    assert xs == (1, 1)
    xs, w = find_PF_monochromatic(evens, [P((1,))], [], 2, 2, strict=True)
    assert xs == (2, 2) and w.span == (8,)
    assert find_PF_monochromatic(W(100, range(1, 101, 2)), [P((1,)), P((3,))], [], 2, 2) is None


def test_pf_witness_verifies():
    xs, w = find_PF_monochromatic(IntWindowSet.full(60), [P((1,)), P((0, 1))], ["x"], 2, 3)
    assert verify_witness(w, Coloring(1, (0,) * 60)).valid


def test_pf_truncation():
    with pytest.raises(SearchTruncated):
        find_PF_monochromatic(W(100, [99]), [P((1,))], [], 2, 2, x_bound=10)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 40), st.data(), st.integers(1, 3), st.sampled_from([2, 3]))
def test_pf_search_matches_oracle(N, data, k, n):
    mem = data.draw(st.sets(st.integers(1, N)))
    F1 = [(1,), (2,)] if k != 3 else [(1,)]
    phi = ["1"] if k == 3 else []
    got = find_PF_monochromatic(W(N, mem), [P(c) for c in F1], phi, n, k)
    want = oracles.pf(mem, N, F1, n, k, lambda x: 1)
    assert (got[0] if got else None) == want


def test_parse_phi():
    f = parse_phi("x^2 + 3·x + 1")
    assert f(2) == 11 and f.source == "x^2 + 3·x + 1"
    for bad in ("x - 1", "y", "import os", "x / 2"):
        with pytest.raises(ValueError):
            parse_phi(bad)(3)


def test_bounded_polys():
    assert len(bounded_polys(1)) == 2
    assert len(bounded_polys(2)) == 24
    with pytest.raises(FamilyTooLarge):
        bounded_polys(8, cap=1000)
