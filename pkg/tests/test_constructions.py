import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unitysums.angles import RootConfig, canonicalize, eval_magnitude, is_vanishing
from unitysums.closed_forms import f4_closed
from unitysums.constructions import (LEMMA_C0, SERIES_K3R, SERIES_K5, dip_bound, dip_locate,
                                     envelope, family_bound, fib, fib_approx_pair, is_pte,
                                     lift6_bound, parse_pte, phi, pte_sum, pte_table,
                                     quad_approx, thm1_bound, z3i_bound, z3i_exact,
                                     z3r_exact, z3r_quad_bound, z3r_series, z5_exact,
                                     z5_series3)
from unitysums.errors import IllegalParameters
from unitysums.search import exact_min_5, exact_min_naive

pytestmark = pytest.mark.filterwarnings("ignore::DeprecationWarning")


def test_fib_and_phi():
    assert fib(0) == 0 and fib(1) == 1 and fib(10) == 55 and fib(20) == 6765
    assert all(fib(m) == fib(m - 1) + fib(m - 2) for m in range(2, 300))
    with mpmath.workdps(50):
        p = phi(50)
        assert abs(p * p - p - 1) < mpmath.mpf(10) ** -48
        assert abs(13 * p - 21 - p ** -7) < mpmath.mpf(10) ** -48
        assert abs(float(13 * p - 21) - 0.0344419) < 1e-7


def test_fib_mod5_pattern():
    for j in range(61):
        assert fib(5 * j) % 5 == 0
        assert fib(5 * j + 1) % 5 == pow(3, j, 5)
        assert fib(5 * j + 2) % 5 == pow(3, j, 5)


def test_approx_pair_examples():
    p = fib_approx_pair(0, 0)
    assert (p.a, p.b) == (5, -5) and abs(float(p.quality) - 3.0901699) < 1e-7
    p = fib_approx_pair(0, 1)
    assert (p.a, p.b) == (13531, -21893)
    with mpmath.workdps(30):
        want = 1 / mpmath.phi - 2 / mpmath.phi ** 20
        assert abs(p.quality - want) < 1e-25
    assert abs(float(p.quality) - 0.6179018) < 1e-7
    p = fib_approx_pair(0, 4)
    assert (p.a, p.b) == (1664169, -2692682)
    assert abs(float(p.quality) - 0.0050239) < 1e-7


def test_lemma_contract():
    for r in range(5):
        prods = []
        for j in range(9):
            p = fib_approx_pair(j, r)
            assert p.a % 5 == r and p.b % 5 == (2 * r) % 5
            assert p.quality > 0
            prod = abs(p.a) * p.quality
            assert prod <= LEMMA_C0
            prods.append(prod)
        for x, y in zip(prods[2:], prods[3:]):
            assert abs(y / x - 1) < 1e-6


def test_fib_approx_pair_arguments():
    with pytest.raises(ValueError):
        fib_approx_pair(-1, 0)
    with pytest.raises(ValueError):
        fib_approx_pair(0, 5)


# ---- exact values and series

def test_z5_examples():
    assert abs(z5_exact(0, 0)) < 1e-28
    n = 47240
    assert abs(z5_exact(Fraction(13, n), Fraction(-21, n))) < 1e-9
    # cross-check against the realized five-root configuration
    n = 40
    cfg = RootConfig.of(n, (0, 12, -12, 20, -20))
    v = z5_exact(Fraction(1, 10), Fraction(1, 10))
    assert abs(abs(v) - eval_magnitude(cfg, 30).value) < 1e-27


def test_z5_series_examples():
    assert z5_series3(0, 0) == 0
    p = (1 + math.sqrt(5)) / 2
    s = math.sin(math.pi / 5)
    want = (-4 * math.pi * s * p * 1e-4 - 2 * math.pi ** 2 * 1e-8 / p
            + 8 * math.pi ** 3 * s / 3 * p * 1e-12)
    assert abs(z5_series3(1e-4, 0) - want) < 1e-18
    with pytest.raises(IllegalParameters):
        z5_series3(0.06, 0)


GRID = [s * 10.0 ** -e for e in (2, 3, 4) for s in (1, -1)]


def test_series_remainders():
    for x in GRID:
        for y in GRID:
            a, b = Fraction(x), Fraction(y)
            h = max(abs(x), abs(y)) ** 4
            assert abs(float(z5_exact(a, b)) - z5_series3(x, y)) <= SERIES_K5 * h
            assert abs(float(z3r_exact(a, b)) - z3r_series(x, y)) <= SERIES_K3R * h


def test_z3_examples():
    assert abs(z3i_exact(0, 0)) < 1e-28
    n = 120
    with mpmath.workdps(40):
        assert abs(z3r_exact(0, Fraction(1, n)) - 4 * mpmath.sin(mpmath.pi / n) ** 2) < 1e-28


@settings(max_examples=40, deadline=None)
@given(st.integers(-200, 200), st.integers(-200, 200), st.integers(4000, 10 ** 6))
def test_z5_series_tracks_exact(a, b, n):
    x, y = a / n, b / n
    h = max(abs(x), abs(y)) ** 4
    assert abs(float(z5_exact(Fraction(a, n), Fraction(b, n))) - z5_series3(x, y)) <= SERIES_K5 * h + 1e-15


# ---- family bounds

def realizable(fb):
    assert fb.legal and fb.config is not None
    m = eval_magnitude(fb.config, 30)
    assert abs(m.value - fb.value.value) <= 2 * max(m.err_bound, fb.value.err_bound) + 1e-40
    if len(fb.config.angles) <= 5:
        assert not is_vanishing(fb.config)


def test_thm1_examples():
    fb = thm1_bound(1000)
    realizable(fb)
    assert fb.value.value >= exact_min_5(1000).value.value
    fb = thm1_bound(1001)
    realizable(fb)
    a, b = fb.params
    assert a % 5 == 4 and b % 5 == 3
    fb = thm1_bound(30)
    realizable(fb)
    assert fb.value.value >= exact_min_naive(5, 30).value.value
    with pytest.raises(IllegalParameters):
        thm1_bound(24)


def test_dip_locate_examples():
    d = dip_locate(4)
    assert (d.a, d.b) == (13, -21)
    assert 46500 <= d.n0 <= 48000 and d.n_star % 5 == 0 and abs(d.n_star - d.n0) <= 2.5
    assert abs(d.A - 0.2544) < 1e-3 and abs(d.B / -1.2023e4 - 1) < 1e-3
    assert abs(d.C / 2.773e5 - 1) < 1e-3
    d3 = dip_locate(3)
    assert (d3.a, d3.b) == (5, -8) and 500 < d3.n0 < 5000
    d5 = dip_locate(5)
    assert (d5.a, d5.b) == (34, -55)
    v = abs(z5_exact(Fraction(d5.a, d5.n_star), Fraction(d5.b, d5.n_star)))
    assert v <= 2 * d5.C * d5.n_star ** (-7 / 3)


def test_dip_bound_legality():
    assert not dip_bound(47241, 13, -21).legal
    fb = dip_bound(47240, 13, -21)
    realizable(fb)


def test_z3i_examples():
    for n in (7007, 10007, 16991):
        assert n % 12 == 11
        for a, b in ((13, -15), (-32, 37)):
            fb = z3i_bound(n, a, b)
            realizable(fb)
            want = abs(z3i_exact(Fraction(a, 3 * n), Fraction(b, 4 * n)))
            assert abs(fb.value.value - want) < 1e-27
    assert not z3i_bound(7008, 13, -15).legal


def test_lift6_examples():
    fb = lift6_bound(12)
    realizable(fb)
    assert canonicalize(fb.config) == canonicalize(RootConfig.of(12, (0, 2, 10, 5, 7)))
    assert abs(float(fb.value.value) - 0.26795) < 1e-5
    assert abs(fb.value.value - f4_closed(12).value.value) < 1e-27
    assert not lift6_bound(13).legal


def test_quad_approx_examples():
    p, q, res = quad_approx(math.sqrt(2), 10)
    assert (p, q) == (51, 6) and abs(res - 0.08831) < 1e-5
    assert quad_approx(0.25, 5) == (1, 2, 0.0)
    p, q, res = quad_approx((1 + math.sqrt(5)) / 2, 1)
    assert (p, q) == (2, 1) and abs(res - 0.38197) < 1e-5
    with pytest.raises(ValueError):
        quad_approx(1.0, 0)


def test_z3r_quad_example():
    fb = z3r_quad_bound(600, 60)
    realizable(fb)
    assert fb.value.value >= exact_min_5(600).value.value
    Q, a, b = fb.params
    x, y = a / 600, b / 600
    assert abs(float(fb.value.value) - abs(z3r_series(x, y))) <= SERIES_K3R * max(abs(x), abs(y)) ** 4
    assert not z3r_quad_bound(601).legal
    with pytest.raises(IllegalParameters):
        z3r_quad_bound(600, 601)


def test_pte_examples():
    fb = pte_sum((0, 3), (1, 2), 100)
    realizable(fb)
    with mpmath.workdps(40):
        want = 4 * mpmath.sin(mpmath.pi / 100) * mpmath.sin(2 * mpmath.pi / 100)
        assert abs(fb.value.value - want) < 1e-28
    assert abs(float(fb.value.value) - 0.0078892) < 1e-7
    fb = pte_sum((0, 3), (1, 2), 4)
    realizable(fb)
    assert is_pte((0, 2), (1, 1))
    with mpmath.workdps(40):
        fb = pte_sum((0, 2), (1, 1), 50)
        assert abs(fb.value.value - 4 * mpmath.sin(mpmath.pi / 50) ** 2) < 1e-28
    assert not pte_sum((0, 3), (1, 2), 7).legal
    with pytest.raises(IllegalParameters):
        pte_sum((0, 4), (1, 2), 10)


def test_pte_table():
    table = pte_table()
    assert set(table) == {2, 3, 4}
    for m, rows in table.items():
        for a, b in rows:
            assert len(a) == m and is_pte(a, b)
    with pytest.raises(ValueError):
        parse_pte("2: 0,3 | 1")


def test_envelope_examples():
    rows = list(envelope("lift6", 12, 600, (6, 0)))
    assert [r.n for r in rows] == list(range(12, 601, 6))
    with mpmath.workdps(40):
        for r in rows:
            assert abs(r.value.value - 4 * mpmath.sin(mpmath.pi / r.n) ** 2) < 1e-28
    rows = list(envelope("z5-dip", 46500, 48000, (5, 0), (13, -21), step=5))
    assert len(rows) == 301 and all(r.legal for r in rows)
    rows = list(envelope("z3i", 7000, 7100, (12, 11), (13, -15)))
    assert rows and all(r.legal for r in rows)
    with pytest.raises(ValueError):
        list(envelope("lift6", 13, 17, (6, 0)))
    with pytest.raises(IllegalParameters):
        family_bound("nope", 10)


def test_dominance_small():
    for n in range(12, 121):
        f5 = exact_min_5(n).value.value
        for fam in ("lift6", "z3i", "z3r-quad", "z5-fib"):
            fb = family_bound(fam, n)
            if fb.legal:
                realizable(fb)
                assert f5 <= fb.value.value + 1e-12, (fam, n)
        fb = family_bound("pte", n, (2,))
        if fb.legal:
            realizable(fb)
            assert f4_closed(n).value.value <= fb.value.value + 1e-12, n


def test_pte_is_not_a_five_root_bound():
    # four roots can beat every five-root sum: f(5, 314) > |1 - x - x^2 + x^3|
    n = 314
    assert exact_min_5(n).value.value > family_bound("pte", n, (2,)).value.value
