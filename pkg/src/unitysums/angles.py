"""Exact angles, root configurations and high-precision evaluation of root sums.

Angles are kept as integer numerators over a fixed denominator ``n``: the
numerator ``a`` stands for the root ``e(a/n) = exp(2*pi*i*a/n)``.  Nothing in
this module reduces a floating-point angle; trigonometric values are produced
by folding the exact rational ``a/n`` into the first octant first.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np
from numba import njit

from .errors import InvalidConfig, PrecisionError, UnsupportedK

MAX_K = 16
MIN_DIGITS = 15
MAX_DIGITS = 60


def _bits_for(digits: int) -> int:
    # ~10 guard decimal digits beyond the request
    return int(math.ceil(digits * math.log2(10))) + 40


def cos_sin_turns(x: Fraction, prec: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Return ``(cos 2*pi*x, sin 2*pi*x)`` at ``prec`` bits for rational ``x``.

    ``x`` is reduced modulo 1 and folded into ``[0, 1/8]`` with exact rational
    arithmetic, so the only real-valued argument ever formed lies in
    ``[0, pi/4]``.
    """
    x = Fraction(x) % 1
    quadrant = math.floor(x * 4)
    y = x - Fraction(quadrant, 4)
    with mpmath.workprec(prec + 10):
        if y * 8 > 1:
            t = (Fraction(1, 4) - y)
            theta = 2 * mpmath.pi * t.numerator / t.denominator
            c, s = mpmath.sin(theta), mpmath.cos(theta)
        else:
            theta = 2 * mpmath.pi * y.numerator / y.denominator
            c, s = mpmath.cos(theta), mpmath.sin(theta)
        # sign flips must stay inside the precision context: unary ops round
        if quadrant == 0:
            return +c, +s
        if quadrant == 1:
            return -s, +c
        if quadrant == 2:
            return -c, -s
        return +s, -c


def c_turns(x, digits: int = 30) -> mpmath.mpf:
    """``c(x) = cos(2*pi*x)`` for rational ``x``."""
    return cos_sin_turns(Fraction(x), _bits_for(digits))[0]


def s_turns(x, digits: int = 30) -> mpmath.mpf:
    """``s(x) = sin(2*pi*x)`` for rational ``x``."""
    return cos_sin_turns(Fraction(x), _bits_for(digits))[1]


@dataclass(frozen=True, order=True)
class RationalAngle:
    """The root ``e(num/den)``; no reduction to lowest terms is applied."""

    num: int
    den: int

    def __post_init__(self):
        if self.den < 1:
            raise InvalidConfig(f"denominator must be >= 1, got {self.den}")
        if not 0 <= self.num < self.den:
            raise InvalidConfig(f"numerator {self.num} outside [0, {self.den})")

    @property
    def turns(self) -> Fraction:
        return Fraction(self.num, self.den)

    def cos(self, digits: int = 30) -> mpmath.mpf:
        return c_turns(self.turns, digits)

    def sin(self, digits: int = 30) -> mpmath.mpf:
        return s_turns(self.turns, digits)


@dataclass(frozen=True)
class RootConfig:
    """A multiset of ``k`` numerators in ``[0, n)``, stored sorted."""

    n: int
    angles: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidConfig(f"n must be a positive integer, got {self.n!r}")
        angles = tuple(sorted(int(a) for a in self.angles))
        if not 1 <= len(angles) <= MAX_K:
            raise InvalidConfig(f"k={len(angles)} outside [1, {MAX_K}]")
        for a in angles:
            if not 0 <= a < self.n:
                raise InvalidConfig(f"numerator {a} outside [0, {self.n})")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "angles", angles)

    @classmethod
    def of(cls, n: int, numerators: Iterable[int]) -> "RootConfig":
        """Build a config, reducing arbitrary integer numerators mod ``n``."""
        return cls(n, tuple(int(a) % n for a in numerators))

    @property
    def k(self) -> int:
        return len(self.angles)

    def rotated(self, shift: int) -> "RootConfig":
        return RootConfig.of(self.n, (a + shift for a in self.angles))

    def reflected(self) -> "RootConfig":
        return RootConfig.of(self.n, (-a for a in self.angles))

    def roots(self) -> list[RationalAngle]:
        return [RationalAngle(a, self.n) for a in self.angles]

    def complex_value(self) -> complex:
        """Double-precision sum, for quick looks only."""
        w = 2 * math.pi / self.n
        return complex(sum(math.cos(w * a) for a in self.angles),
                       sum(math.sin(w * a) for a in self.angles))

    def __str__(self):
        return f"n={self.n} {{{', '.join(map(str, self.angles))}}}"


@dataclass(frozen=True)
class Magnitude:
    """A nonnegative extended-precision value with a certified absolute error."""

    value: mpmath.mpf
    digits: int
    err_bound: float

    def __post_init__(self):
        if self.err_bound < 0:
            raise ValueError("err_bound must be nonnegative")

    def __float__(self):
        return float(self.value)

    def close_to(self, other, tol: float | None = None) -> bool:
        """True when the two values agree within ``tol`` (default: both error bounds)."""
        other_value = other.value if isinstance(other, Magnitude) else other
        other_err = other.err_bound if isinstance(other, Magnitude) else 0.0
        if tol is None:
            tol = 2 * max(self.err_bound, other_err)
        with mpmath.workprec(_bits_for(self.digits)):
            return abs(self.value - other_value) <= tol


def eval_magnitude(config: RootConfig, digits: int = 30) -> Magnitude:
    """``|sum e(a_i/n)|`` with absolute error at most ``10**(2 - digits)``.

    Each distinct numerator is evaluated once through ``cos_sin_turns``; the
    working precision carries ~10 guard digits, and the stated error bound
    covers ``k`` terms at a few ulps each.
    """
    if not isinstance(config, RootConfig):
        raise InvalidConfig(f"expected RootConfig, got {type(config).__name__}")
    if not MIN_DIGITS <= digits <= MAX_DIGITS:
        raise PrecisionError(f"digits={digits} outside [{MIN_DIGITS}, {MAX_DIGITS}]")
    prec = _bits_for(digits)
    with mpmath.workprec(prec):
        re = mpmath.mpf(0)
        im = mpmath.mpf(0)
        for a, mult in sorted(Counter(config.angles).items()):
            c, s = cos_sin_turns(Fraction(a, config.n), prec)
            re += mult * c
            im += mult * s
        value = mpmath.sqrt(re * re + im * im)
    err = config.k * 2.0 ** (-prec + 4)
    return Magnitude(value=value, digits=digits, err_bound=err)


class VanishKind(enum.Enum):
    NOT_VANISHING = "not-vanishing"
    PAIR = "pair"
    TRIANGLE = "triangle"
    TWO_PAIRS = "two-pairs"
    PENTAGON = "pentagon"
    TRIANGLE_PLUS_PAIR = "triangle-plus-pair"


@dataclass(frozen=True)
class VanishDecomposition:
    kind: VanishKind
    parts: tuple[tuple[int, ...], ...] = field(default=())

    def __bool__(self):
        return self.kind is not VanishKind.NOT_VANISHING


_NOT_VANISHING = VanishDecomposition(VanishKind.NOT_VANISHING)


def _is_progression(vals: Sequence[int], n: int, p: int) -> bool:
    # vals sorted; true iff vals == {c + j*n/p}
    if n % p or len(vals) != p:
        return False
    step = n // p
    return all(vals[j] - vals[0] == j * step for j in range(p))


def _pair_up(vals: Sequence[int], n: int):
    """Split a multiset into antipodal pairs, or return None."""
    if n % 2:
        return None
    half = n // 2
    counts = Counter(vals)
    pairs = []
    for x in sorted(counts):
        if x >= half:
            break
        if counts[x] != counts[x + half]:
            return None
        pairs.extend([(x, x + half)] * counts[x])
    if 2 * len(pairs) != len(vals):
        return None
    return pairs


def is_vanishing(config: RootConfig) -> VanishDecomposition:
    """Exact decision whether ``k <= 5`` roots sum to zero, with a decomposition.

    Minimal vanishing sums have either a prime number of terms (a regular
    polygon) or at least six terms, so for ``k <= 5`` the only possibilities
    are pairs, triangles, two pairs, a pentagon, or a triangle plus a pair.
    """
    k, n = config.k, config.n
    vals = config.angles
    if k > 5:
        raise UnsupportedK(f"vanishing classifier is exact only for k <= 5, got k={k}")
    if k == 2:
        pairs = _pair_up(vals, n)
        return VanishDecomposition(VanishKind.PAIR, (tuple(vals),)) if pairs else _NOT_VANISHING
    if k == 3:
        if _is_progression(vals, n, 3):
            return VanishDecomposition(VanishKind.TRIANGLE, (tuple(vals),))
        return _NOT_VANISHING
    if k == 4:
        pairs = _pair_up(vals, n)
        if pairs:
            return VanishDecomposition(VanishKind.TWO_PAIRS, tuple(pairs))
        return _NOT_VANISHING
    if k == 5:
        if _is_progression(vals, n, 5):
            return VanishDecomposition(VanishKind.PENTAGON, (tuple(vals),))
        if n % 6 == 0:
            for i in range(5):
                for j in range(i + 1, 5):
                    for l in range(j + 1, 5):
                        tri = (vals[i], vals[j], vals[l])
                        if not _is_progression(tri, n, 3):
                            continue
                        rest = tuple(vals[m] for m in range(5) if m not in (i, j, l))
                        if rest[1] - rest[0] == n // 2:
                            return VanishDecomposition(VanishKind.TRIANGLE_PLUS_PAIR, (tri, rest))
        return _NOT_VANISHING
    return _NOT_VANISHING


def canonicalize(config: RootConfig) -> RootConfig:
    """Lexicographically least form over rotations-to-zero and reflection."""
    n = config.n
    best = None
    for anchor in set(config.angles):
        for sign in (1, -1):
            cand = tuple(sorted((sign * (a - anchor)) % n for a in config.angles))
            if best is None or cand < best:
                best = cand
    return RootConfig(n, best)


def trig_table(m: int) -> tuple[np.ndarray, np.ndarray]:
    """``cos(2*pi*j/m)`` and ``sin(2*pi*j/m)`` for ``j in [0, m)`` as float64.

    Each entry is computed from an argument in ``[0, pi/4]`` obtained by
    integer folding of ``j/m``.
    """
    j = np.arange(m, dtype=np.int64)
    quad = (4 * j) // m
    rem = 4 * j - quad * m          # y = rem / (4m) turns, rem in [0, m)
    upper = 2 * rem > m             # y > 1/8: use the complement 1/4 - y
    folded = np.where(upper, m - rem, rem).astype(np.float64)
    theta = folded * (np.pi / (2 * m))
    c0 = np.where(upper, np.sin(theta), np.cos(theta))
    s0 = np.where(upper, np.cos(theta), np.sin(theta))
    cos = np.select([quad == 0, quad == 1, quad == 2], [c0, -s0, -c0], s0)
    sin = np.select([quad == 0, quad == 1, quad == 2], [s0, c0, -s0], -c0)
    return cos, sin


@njit(cache=True, nogil=True)
def vanishes_sorted(vals, n):
    """Exact vanishing test for up to five sorted numerators (jit twin of is_vanishing)."""
    k = vals.shape[0]
    if k == 2:
        return n % 2 == 0 and vals[1] - vals[0] == n // 2
    if k == 3:
        return n % 3 == 0 and vals[1] - vals[0] == n // 3 and vals[2] - vals[1] == n // 3
    if k == 4:
        if n % 2:
            return False
        h = n // 2
        # sorted two-pair multisets pair i with i+2
        return vals[2] - vals[0] == h and vals[3] - vals[1] == h
    if k == 5:
        if n % 5 == 0:
            st = n // 5
            ok = True
            for j in range(1, 5):
                if vals[j] - vals[0] != j * st:
                    ok = False
                    break
            if ok:
                return True
        if n % 6 == 0:
            t = n // 3
            h = n // 2
            for i in range(5):
                for j in range(i + 1, 5):
                    if vals[j] - vals[i] != t:
                        continue
                    for l in range(j + 1, 5):
                        if vals[l] - vals[j] != t:
                            continue
                        r0 = -1
                        r1 = -1
                        for m in range(5):
                            if m != i and m != j and m != l:
                                if r0 < 0:
                                    r0 = vals[m]
                                else:
                                    r1 = vals[m]
                        if r1 - r0 == h:
                            return True
        return False
    return False
