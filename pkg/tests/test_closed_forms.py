import itertools
import math
from fractions import Fraction

import mpmath
import pytest

from unitysums.angles import RootConfig, canonicalize, eval_magnitude, is_vanishing
from unitysums.closed_forms import (N_MIN3, closed_form_record, f2_closed, f3_closed, f4_closed,
                                    lattice_t, witness_is_valid)
from unitysums.errors import InvalidConfig
from unitysums.search import exact_min_naive


def close(m, x, tol=1e-25):
    return abs(float(m.value) - x) < tol if isinstance(x, float) else abs(m.value - x) < tol


@mpmath.workdps(40)
def test_f2_examples():
    r = f2_closed(4)
    assert close(r.value, mpmath.sqrt(2)) and r.witness.angles == (0, 1)
    r = f2_closed(5)
    assert abs(r.value.value - 2 * mpmath.sin(mpmath.pi / 10)) < 1e-28
    assert r.witness.angles == (0, 2)
    r = f2_closed(6)
    assert abs(r.value.value - 1) < 1e-28 and r.witness.angles == (0, 2)
    r = f2_closed(1)
    assert r.value.value == 2 and r.witness.angles == (0, 0)


@mpmath.workdps(40)
def test_f3_examples():
    r = f3_closed(3)
    assert abs(r.value.value - mpmath.sqrt(3)) < 1e-28
    assert canonicalize(r.witness) == canonicalize(RootConfig.of(3, (0, 1, 1)))
    with mpmath.workdps(40):
        x = 2 * mpmath.pi / 15
        assert abs(f3_closed(5).value.value - (mpmath.sqrt(3) * mpmath.sin(x)
                                               - 2 * mpmath.sin(x / 2) ** 2)) < 1e-28
        y = 2 * mpmath.pi / 21
        want7 = mpmath.sqrt(3) * mpmath.sin(y) + 2 * mpmath.sin(y / 2) ** 2
        assert abs(f3_closed(7).value.value - want7) < 1e-28
    # the formulas evaluate to 0.6180340 and 0.5549581
    assert abs(float(f3_closed(5).value.value) - 0.6180340) < 1e-7
    assert abs(float(f3_closed(7).value.value) - 0.5549581) < 1e-7


@mpmath.workdps(40)
def test_f3_three_divides_uses_proof_value():
    for n in (9, 12, 30, 99):
        r = f3_closed(n)
        assert abs(r.value.value - 2 * mpmath.sin(mpmath.pi / n)) < 1e-28
        assert r.witness.angles == (1, n // 3, 2 * n // 3)
        # the printed 2 sin(pi/3n) would be smaller than the true minimum
        assert 2 * math.sin(math.pi / (3 * n)) < float(exact_min_naive(3, n).value.value)


@mpmath.workdps(40)
def test_f4_examples():
    assert f4_closed(2).value.value == 2 and f4_closed(2).witness.angles == (0, 0, 0, 1)
    assert abs(f4_closed(4).value.value - mpmath.sqrt(2)) < 1e-28
    assert f4_closed(4).witness.angles == (0, 0, 1, 2)
    r = f4_closed(6)
    assert abs(r.value.value - 1) < 1e-28 and r.witness.angles == (0, 2, 2, 4)
    with pytest.raises(InvalidConfig):
        f4_closed(1)


@pytest.mark.parametrize("k,f", [(2, f2_closed), (3, f3_closed), (4, f4_closed)])
def test_witness_validity(k, f):
    for n in range(max(2, N_MIN3), 200):
        r = f(n)
        assert r.witness.k == k
        assert not is_vanishing(r.witness)
        assert abs(eval_magnitude(r.witness, 30).value - r.value.value) < 1e-25
        assert witness_is_valid(r)


def test_oracle_equivalence_small():
    for k, f in ((2, f2_closed), (3, f3_closed), (4, f4_closed)):
        for n in range(2, 61):
            want = exact_min_naive(k, n).value.value
            assert abs(f(n).value.value - want) <= 1e-12 * max(1, want), (k, n)


def test_closed_form_record_is_canonical():
    rec = closed_form_record(4, 10)
    assert rec.witness == canonicalize(rec.witness)
    assert closed_form_record(1, 9).value.value == 1
    assert closed_form_record(5, 9) is None


def test_lattice_examples():
    assert lattice_t(1, -1).norm2 == 1
    assert lattice_t(1, 0).norm2 == 1
    assert lattice_t(0, 0, Fraction(1, 3)).norm2 == Fraction(1, 3)
    assert abs(abs(lattice_t(0, 0, Fraction(1, 3))) - 1 / math.sqrt(3)) < 1e-15
    with pytest.raises(ValueError):
        lattice_t(0, 0, Fraction(1, 2))


def test_lattice_claims():
    box = list(itertools.product(range(-3, 4), repeat=2))
    norms = [lattice_t(a, b).norm2 for a, b in box if (a, b) != (0, 0)]
    assert min(norms) == 1
    for off in (Fraction(1, 3), Fraction(-1, 3)):
        norms = {(a, b): lattice_t(a, b, off).norm2 for a, b in box}
        m = min(norms.values())
        assert m == Fraction(1, 3)
        argmin = sorted(p for p, v in norms.items() if v == m)
        assert len(argmin) == 3
    at = {off: sorted(p for p in box if lattice_t(*p, off).norm2 == Fraction(1, 3))
          for off in (Fraction(1, 3), Fraction(-1, 3))}
    assert at[Fraction(1, 3)] == [(-1, 0), (0, -1), (0, 0)]
    assert at[Fraction(-1, 3)] == [(0, 0), (0, 1), (1, 0)]
