import cmath
import itertools
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unitysums.angles import (Magnitude, RationalAngle, RootConfig, VanishKind, canonicalize,
                              cos_sin_turns, eval_magnitude, is_vanishing, trig_table,
                              vanishes_sorted)
from unitysums.errors import InvalidConfig, PrecisionError, UnsupportedK

import numpy as np


@st.composite
def configs(draw, max_n=300, max_k=8):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(1, max_k))
    nums = draw(st.lists(st.integers(0, n - 1), min_size=k, max_size=k))
    return RootConfig.of(n, nums)


def brute(cfg):
    return abs(sum(cmath.exp(2j * math.pi * a / cfg.n) for a in cfg.angles))


# ---- examples

@pytest.mark.parametrize("n,nums,want", [
    (5, (0, 1, 2, 3, 4), 0.0),
    (4, (0, 1), mpmath.sqrt(mpmath.mpf(2), prec=200)),
    (6, (0, 1, 5, 3, 3), 0.0),
    (12, (0, 4, 8, 3, 9), 0.0),
])
def test_eval_examples(n, nums, want):
    m = eval_magnitude(RootConfig.of(n, nums), 30)
    assert abs(m.value - want) <= 1e-28


def test_eval_sqrt2_to_full_precision():
    m = eval_magnitude(RootConfig.of(4, (0, 1)), 50)
    with mpmath.workdps(60):
        assert abs(m.value - mpmath.sqrt(2)) < 1e-48


def test_precision_bounds():
    cfg = RootConfig.of(5, (0, 1))
    with pytest.raises(PrecisionError):
        eval_magnitude(cfg, 14)
    with pytest.raises(PrecisionError):
        eval_magnitude(cfg, 61)
    with pytest.raises(InvalidConfig):
        eval_magnitude((0, 1), 30)


def test_err_bound_contract():
    m = eval_magnitude(RootConfig.of(7, (0, 1, 2, 3, 4, 5)), 20)
    assert m.err_bound <= 10.0 ** (2 - 20)


def test_rational_angle_and_config_validation():
    with pytest.raises(ValueError):
        RationalAngle(5, 5)
    with pytest.raises(ValueError):
        RationalAngle(0, 0)
    assert RationalAngle(1, 4) < RationalAngle(2, 4)
    with pytest.raises(ValueError):
        RootConfig(5, (0, 5))
    with pytest.raises(ValueError):
        RootConfig(5, tuple([0] * 17))


def test_argument_reduction_large_n():
    # a/n close to 1/4 with a huge denominator: folded exactly, so no loss
    n = 10 ** 30 + 7
    a = n // 4
    c, s = cos_sin_turns(Fraction(a, n), 200)
    with mpmath.workprec(400):
        x = 2 * mpmath.pi * mpmath.mpf(a) / n
        assert abs(c - mpmath.cos(x)) < mpmath.mpf(2) ** -190
        assert abs(s - mpmath.sin(x)) < mpmath.mpf(2) ** -190


def test_trig_table_matches_mpmath():
    c, s = trig_table(360)
    for j in (0, 1, 45, 89, 90, 179, 271, 359):
        with mpmath.workdps(30):
            x = 2 * mpmath.pi * j / 360
            assert abs(c[j] - mpmath.cos(x)) < 1.2e-16
            assert abs(s[j] - mpmath.sin(x)) < 1.2e-16


# ---- classifier

@pytest.mark.parametrize("n,nums,kind,parts", [
    (5, (0, 1, 2, 3, 4), VanishKind.PENTAGON, [(0, 1, 2, 3, 4)]),
    (12, (0, 4, 8, 3, 9), VanishKind.TRIANGLE_PLUS_PAIR, [(0, 4, 8), (3, 9)]),
])
def test_classifier_examples(n, nums, kind, parts):
    d = is_vanishing(RootConfig.of(n, nums))
    assert d.kind == kind
    assert sorted(tuple(sorted(p)) for p in d.parts) == sorted(parts)


@pytest.mark.parametrize("n,nums", [(5, (0, 0, 0, 0, 0)), (7, (0, 1, 2, 3, 4))])
def test_classifier_negative_examples(n, nums):
    assert not is_vanishing(RootConfig.of(n, nums))


def test_classifier_unsupported_k():
    with pytest.raises(UnsupportedK):
        is_vanishing(RootConfig.of(6, range(6)))


def test_classifier_complete_small_n():
    for n in range(1, 13):
        for k in range(1, 6):
            for nums in itertools.combinations_with_replacement(range(n), k):
                cfg = RootConfig(n, nums)
                zero = eval_magnitude(cfg, 40).value < 1e-35
                assert bool(is_vanishing(cfg)) == zero, cfg
                assert bool(vanishes_sorted(np.array(nums, dtype=np.int64), n)) == zero, cfg


# ---- canonical form

@pytest.mark.parametrize("n,nums,want", [
    (5, (1, 2, 3, 4, 0), (0, 1, 2, 3, 4)),
    (10, (1, 3), (0, 2)),
    (7, (0, 6), (0, 1)),
])
def test_canonicalize_examples(n, nums, want):
    assert canonicalize(RootConfig.of(n, nums)).angles == want


# ---- properties

@settings(max_examples=150, deadline=None)
@given(configs(), st.integers(0, 10 ** 6))
def test_rotation_invariance(cfg, shift):
    m = eval_magnitude(cfg)
    assert eval_magnitude(cfg.rotated(shift)).close_to(m)


@settings(max_examples=150, deadline=None)
@given(configs())
def test_reflection_invariance(cfg):
    m = eval_magnitude(cfg)
    assert eval_magnitude(cfg.reflected()).close_to(m)


@settings(max_examples=150, deadline=None)
@given(configs())
def test_canonical_idempotent_and_invariant(cfg):
    c = canonicalize(cfg)
    assert canonicalize(c) == c
    assert canonicalize(cfg.rotated(3).reflected()) == c
    assert eval_magnitude(c).close_to(eval_magnitude(cfg))
    assert c.angles[0] == 0


@settings(max_examples=100, deadline=None)
@given(configs(max_k=5))
def test_classifier_sound(cfg):
    if is_vanishing(cfg):
        assert eval_magnitude(cfg, 40).value < 1e-35


@settings(max_examples=100, deadline=None)
@given(configs(), st.integers(15, 50))
def test_precision_monotone(cfg, d):
    assert eval_magnitude(cfg, d + 10).err_bound <= eval_magnitude(cfg, d).err_bound


@settings(max_examples=100, deadline=None)
@given(configs())
def test_matches_double_precision(cfg):
    assert abs(float(eval_magnitude(cfg).value) - brute(cfg)) < 1e-12


def test_magnitude_close_to():
    a = Magnitude(mpmath.mpf(1), 30, 1e-30)
    assert a.close_to(1.0)
    with mpmath.workdps(40):
        assert not a.close_to(mpmath.mpf(1) + mpmath.mpf(10) ** -20)
