"""Constructive upper bounds on f(5, n) (and the PTE sums for other k).

Every family realizes an explicit configuration of n-th roots, so its value
is an honest upper bound; values are always reported from ``eval_magnitude``
on the realized configuration.

Families:
  z5-fib    pentagon perturbed by Fibonacci approximants of phi (5 roots)
  z5-dip    pentagon perturbed by (a/n, b/n), 5 | n
  z3i       triangle plus the pair +-i, perturbed
  lift6     1 = e(1/6) + e(-1/6) applied to the k=4 witness, 6 | n
  z3r-quad  z_{3,+-1} with (a, b) from a brute-force quadratic approximation
  pte       2m roots from a Prouhet-Tarry-Escott solution, n even
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Iterator, Sequence

import mpmath
import numpy as np

from .angles import Magnitude, RootConfig, _bits_for, c_turns, eval_magnitude, is_vanishing
from .errors import IllegalParameters

FAMILIES = ("z5-fib", "z5-dip", "z3i", "lift6", "z3r-quad", "pte")

# Empirical constants, calibrated by scripts/calibrate_constants.py and frozen.
# max |a_{j,r}| * (a_{j,r} phi + b_{j,r}) over j <= 8 and all r (21893.36), +25%
LEMMA_C0 = 27367.0
# max n^(4/3) * thm1_bound(n) over 500 <= n <= 3000 (no headroom: callers add it)
THM1_C = 11.6016
# |z5_exact - z5_series3| <= K * max(|alpha|, |beta|)^4 for |alpha|, |beta| <= 1e-2
# (calibrated 106.02, +25%)
SERIES_K5 = 132.5
# same for z3r_series at order 3 (calibrated 129.87, +25%)
SERIES_K3R = 162.3

SIN_PI_5 = math.sin(math.pi / 5)


def phi(digits: int = 50) -> mpmath.mpf:
    with mpmath.workprec(_bits_for(digits)):
        return +mpmath.phi


@lru_cache(maxsize=None)
def fib(m: int) -> int:
    """Exact Fibonacci number F_m (F_0 = 0, F_1 = 1) by fast doubling."""
    if m < 0:
        raise ValueError("m must be >= 0")

    def pair(k):
        if k == 0:
            return 0, 1
        f, g = pair(k >> 1)
        c = f * (2 * g - f)
        d = f * f + g * g
        return (d, c + d) if k & 1 else (c, d)

    return pair(m)[0]


@dataclass(frozen=True)
class ApproxPair:
    j: int
    r: int
    a: int
    b: int
    quality: mpmath.mpf


# (offset of the F_{20j+1+s} term, offset of the 2F_{20j+1+t} term) per residue
_LEMMA_OFFSETS = {1: (0, 19), 4: (10, 29), 3: (25, 4), 2: (35, 14)}


def fib_approx_pair(j: int, r: int) -> ApproxPair:
    """Integers a = r, b = 2r (mod 5) with 0 < a*phi + b = O(1/|a|)."""
    if j < 0 or r not in range(5):
        raise ValueError("need j >= 0 and r in 0..4")
    m = 20 * j + 1
    if r == 0:
        a, b = 5 * fib(m), -5 * fib(m + 1)
    else:
        s, t = _LEMMA_OFFSETS[r]
        a = fib(m + s) + 2 * fib(m + t)
        b = -(fib(m + s + 1) + 2 * fib(m + t + 1))
    # a*phi + b cancels about 2*log2|a| bits; keep 50 digits beyond that
    with mpmath.workprec(_bits_for(50) + 2 * abs(a).bit_length()):
        quality = +(a * mpmath.phi + b)
    assert a % 5 == r and b % 5 == (2 * r) % 5, (j, r, a, b)
    assert quality > 0, (j, r)
    return ApproxPair(j, r, a, b, quality)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def z5_exact(alpha, beta, digits: int = 30) -> mpmath.mpf:
    """``1 + 2c(1/5 + alpha) + 2c(2/5 + beta)`` (signed)."""
    alpha, beta = _frac(alpha), _frac(beta)
    with mpmath.workprec(_bits_for(digits)):
        return 1 + 2 * c_turns(Fraction(1, 5) + alpha, digits) \
            + 2 * c_turns(Fraction(2, 5) + beta, digits)


def z5_series3(alpha, beta) -> float:
    """Third-order expansion of ``z5_exact`` around the regular pentagon."""
    alpha, beta = float(alpha), float(beta)
    if max(abs(alpha), abs(beta)) > 0.05:
        raise IllegalParameters("series regime requires |alpha|, |beta| <= 0.05")
    p = (1 + 5 ** 0.5) / 2
    pi = math.pi
    return (-4 * pi * SIN_PI_5 * (alpha * p + beta)
            - 2 * pi ** 2 * (alpha ** 2 / p - beta ** 2 * p)
            + 8 * pi ** 3 * SIN_PI_5 / 3 * (alpha ** 3 * p + beta ** 3))


def z3i_exact(alpha, beta, digits: int = 30) -> mpmath.mpf:
    """``1 + 2c(1/3 + alpha) + 2c(1/4 + beta)`` (signed)."""
    alpha, beta = _frac(alpha), _frac(beta)
    with mpmath.workprec(_bits_for(digits)):
        return 1 + 2 * c_turns(Fraction(1, 3) + alpha, digits) \
            + 2 * c_turns(Fraction(1, 4) + beta, digits)


def z3r_exact(alpha, beta, digits: int = 30) -> mpmath.mpf:
    """``1 + 2c(1/6 + alpha) + 2c(1/2 + beta)`` (signed)."""
    alpha, beta = _frac(alpha), _frac(beta)
    with mpmath.workprec(_bits_for(digits)):
        return 1 + 2 * c_turns(Fraction(1, 6) + alpha, digits) \
            + 2 * c_turns(Fraction(1, 2) + beta, digits)


def z3r_series(alpha, beta, order: int = 3) -> float:
    """Expansion of ``z3r_exact``: quadratic terms, plus the alpha^3 term at order 3."""
    alpha, beta = float(alpha), float(beta)
    pi = math.pi
    val = -2 * pi * math.sqrt(3) * alpha + 2 * pi ** 2 * (2 * beta ** 2 - alpha ** 2)
    if order >= 3:
        val += 4 * pi ** 3 * math.sqrt(3) / 3 * alpha ** 3
    return val


@dataclass(frozen=True)
class FamilyBound:
    family: str
    n: int
    params: tuple
    value: Magnitude | None
    config: RootConfig | None
    legal: bool
    reason: str = ""


def _illegal(family, n, params, reason) -> FamilyBound:
    return FamilyBound(family, n, tuple(params), None, None, False, reason)


def _symmetric(family, n, params, base_u: Fraction, base_v: Fraction, alpha: Fraction,
               beta: Fraction, digits=30) -> FamilyBound:
    """Realize ``1 + e(+-(base_u + alpha)) + e(+-(base_v + beta))`` over n."""
    u = n * (base_u + alpha)
    v = n * (base_v + beta)
    if u.denominator != 1 or v.denominator != 1:
        return _illegal(family, n, params, "congruence conditions not met")
    u, v = int(u), int(v)
    config = RootConfig.of(n, (0, u, -u, v, -v))
    if is_vanishing(config):
        return _illegal(family, n, params, "degenerate parameters give a vanishing sum")
    return FamilyBound(family, n, tuple(params), eval_magnitude(config, digits), config, True)


def z5_bound(n: int, alpha: Fraction, beta: Fraction, family: str = "z5-dip",
             params: tuple = ()) -> FamilyBound:
    return _symmetric(family, n, params or (alpha, beta), Fraction(1, 5), Fraction(2, 5),
                      _frac(alpha), _frac(beta))


# -------------------------------------------------------------- n^(-4/3) family

# coefficient range |x|, |y| <= DENSE_X and gap t <= DENSE_T of the dense family:
# the smallest family whose calibrated constant matches that of a much wider one
DENSE_X = 3
DENSE_T = 2


def _dense_pairs(n: int, r: int) -> np.ndarray:
    """Two-term Fibonacci combinations ``a = xF_m + yF_{m+t}``, ``b = -(xF_{m+1} + yF_{m+t+1})``
    with residues (r, 2r) mod 5 and |a|, |b| <= sqrt(n)."""
    lim = math.isqrt(n)
    top = 2
    while fib(top) <= DENSE_X * lim + DENSE_X:
        top += 1
    F = np.array([fib(m) for m in range(top + 10)], dtype=np.int64)
    xs = np.arange(-DENSE_X, DENSE_X + 1)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    X, Y = X.ravel(), Y.ravel()
    out = []
    for t in range(DENSE_T + 1):
        for m in range(0, top):
            a = X * F[m] + Y * F[m + t]
            b = -(X * F[m + 1] + Y * F[m + t + 1])
            ok = ((a % 5) == r) & ((b % 5) == (2 * r) % 5) & (np.abs(a) <= lim) & \
                (np.abs(b) <= lim) & ((a != 0) | (b != 0))
            if ok.any():
                out.append(np.stack([a[ok], b[ok]], axis=1))
    if not out:
        return np.empty((0, 2), dtype=np.int64)
    return np.unique(np.concatenate(out), axis=0)


def thm1_candidates(n: int) -> np.ndarray:
    """All (a, b) pairs tried by ``thm1_bound``: the lemma sequences (and sign flips)
    plus the dense two-term family."""
    r = (-n) % 5
    lim = math.isqrt(n)
    pairs = []
    for rr, sign in ((r, 1), ((-r) % 5, -1)):
        j = 0
        while True:
            p = fib_approx_pair(j, rr)
            if abs(p.a) > lim:
                break
            if abs(p.b) <= lim:
                pairs.append((sign * p.a, sign * p.b))
            j += 1
    dense = _dense_pairs(n, r)
    if pairs:
        dense = np.unique(np.concatenate([dense, np.array(pairs, dtype=np.int64)]), axis=0)
    return dense


def thm1_bound(n: int, refine: int = 8) -> FamilyBound:
    """Best ``z5(a/5n, b/5n)`` over Fibonacci-type pairs with ``a = -n``, ``b = -2n`` (mod 5)."""
    if n < 25:
        raise IllegalParameters("thm1_bound requires n >= 25")
    cand = thm1_candidates(n)
    if len(cand) == 0:
        return _illegal("z5-fib", n, (), "no admissible (a, b)")
    a = cand[:, 0].astype(float)
    b = cand[:, 1].astype(float)
    approx = np.abs(1 + 2 * np.cos(2 * np.pi * (0.2 + a / (5 * n)))
                    + 2 * np.cos(2 * np.pi * (0.4 + b / (5 * n))))
    order = np.lexsort((cand[:, 1], cand[:, 0], approx))
    best = None
    for i in order[:refine]:
        ai, bi = int(cand[i, 0]), int(cand[i, 1])
        fb = z5_bound(n, Fraction(ai, 5 * n), Fraction(bi, 5 * n), "z5-fib", (ai, bi))
        assert fb.legal or fb.reason.startswith("degenerate"), fb
        if fb.legal and (best is None or fb.value.value < best.value.value):
            best = fb
    return best if best is not None else _illegal("z5-fib", n, (), "all candidates vanish")


# -------------------------------------------------------------- dip near n0

@dataclass(frozen=True)
class DipLocation:
    j: int
    a: int
    b: int
    A: float
    B: float
    C: float
    n0: float
    n_star: int


def dip_locate(j: int) -> DipLocation:
    """Root of ``g(n) = An^2 + Bn + C`` for ``a = F_{2j-1}``, ``b = -F_{2j}``.

    ``n^3 z5(a/n, b/n) = -g(n) + O(a^4/n)``, so the bound dips near the root.
    """
    if j < 1:
        raise IllegalParameters("j must be >= 1")
    a, b = fib(2 * j - 1), -fib(2 * j)
    with mpmath.workprec(_bits_for(40)):
        p = mpmath.phi
        s = mpmath.sin(mpmath.pi / 5)
        A = 4 * mpmath.pi * s * (a * p + b)
        B = 2 * mpmath.pi ** 2 * (a * a / p - b * b * p)
        C = -(8 * mpmath.pi ** 3 * s / 3) * (a ** 3 * p + b ** 3)
        if not (A > 0 and B < 0 and C > 0):
            raise IllegalParameters(f"sign conditions A > 0, B < 0, C > 0 fail for j={j}")
        n0 = -B / (2 * A) * (1 + mpmath.sqrt(1 - 4 * A * C / B ** 2))
    n_star = 5 * int(mpmath.nint(n0 / 5))
    return DipLocation(j, a, b, float(A), float(B), float(C), float(n0), n_star)


def dip_bound(n: int, a: int, b: int) -> FamilyBound:
    """``z5(a/n, b/n)``, which is realizable when 5 | n."""
    if n % 5:
        return _illegal("z5-dip", n, (a, b), "requires 5 | n")
    return z5_bound(n, Fraction(a, n), Fraction(b, n), "z5-dip", (a, b))


# -------------------------------------------------------------- triangle families

def z3i_bound(n: int, a: int, b: int) -> FamilyBound:
    """``z3i(a/3n, b/4n)``; needs ``a = -n (mod 3)`` and ``b = -n (mod 4)``."""
    if (a + n) % 3 or (b + n) % 4:
        return _illegal("z3i", n, (a, b), "requires a = -n (mod 3) and b = -n (mod 4)")
    return _symmetric("z3i", n, (a, b), Fraction(1, 3), Fraction(1, 4), Fraction(a, 3 * n),
                      Fraction(b, 4 * n))


def z3r_bound(n: int, a: int, b: int, family: str = "z3r") -> FamilyBound:
    """``z3r(a/n, b/n)``, realizable when 6 | n."""
    if n % 6:
        return _illegal(family, n, (a, b), "requires 6 | n")
    return _symmetric(family, n, (a, b), Fraction(1, 6), Fraction(1, 2), Fraction(a, n),
                      Fraction(b, n))


def lift6_bound(n: int) -> FamilyBound:
    """The k=4 witness lifted by ``1 = e(1/6) + e(-1/6)``: value ``4 sin^2(pi/n)``."""
    return z3r_bound(n, 0, 1, "lift6")


def quad_approx(xi: float, Q: int) -> tuple[int, int, float]:
    """Brute-force ``min_{1 <= q <= Q} |q^2 xi - round(q^2 xi)|`` (least q on ties)."""
    if Q < 1:
        raise ValueError("Q must be >= 1")
    best = None
    with mpmath.workdps(30):
        xi = mpmath.mpf(xi)
        for q in range(1, Q + 1):
            x = q * q * xi
            p = int(mpmath.nint(x))
            res = abs(x - p)
            if best is None or res < best[2]:
                best = (p, q, res)
    return best[0], best[1], float(best[2])


def default_quad_Q(n: int) -> int:
    return max(1, round(n ** (21 / 32)))


def z3r_quad_bound(n: int, Q: int | None = None) -> FamilyBound:
    if n % 6:
        return _illegal("z3r-quad", n, (Q,), "requires 6 | n")
    Q = default_quad_Q(n) if Q is None else Q
    if not 1 <= Q <= n:
        raise IllegalParameters("requires 1 <= Q <= n")
    with mpmath.workdps(30):
        xi = 2 * mpmath.pi / (mpmath.sqrt(3) * n)
    p, q, _ = quad_approx(xi, Q)
    fb = z3r_bound(n, -p, q, "z3r-quad")
    return FamilyBound("z3r-quad", n, (Q, -p, q), fb.value, fb.config, fb.legal, fb.reason)


# -------------------------------------------------------------- PTE

def parse_pte(text: str) -> dict[int, list[tuple[tuple[int, ...], tuple[int, ...]]]]:
    """Parse lines ``m: a1,...,am | b1,...,bm`` (``#`` starts a comment)."""
    table: dict[int, list] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            head, body = line.split(":", 1)
            left, right = body.split("|")
            m = int(head)
            a = tuple(int(x) for x in left.split(","))
            b = tuple(int(x) for x in right.split(","))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: malformed PTE entry {raw!r}") from exc
        if len(a) != m or len(b) != m:
            raise ValueError(f"line {lineno}: expected {m} entries per side")
        table.setdefault(m, []).append((a, b))
    return table


@lru_cache(maxsize=1)
def pte_table():
    text = resources.files("unitysums").joinpath("data/pte.txt").read_text()
    return parse_pte(text)


def is_pte(a: Sequence[int], b: Sequence[int]) -> bool:
    m = len(a)
    return len(b) == m and all(sum(x ** e for x in a) == sum(x ** e for x in b)
                               for e in range(m))


def pte_sum(a_list: Sequence[int], b_list: Sequence[int], n: int) -> FamilyBound:
    """``|sum e(a_i/n) - sum e(b_i/n)|`` with ``-e(b/n)`` realized as ``e((b + n/2)/n)``."""
    params = (tuple(a_list), tuple(b_list))
    if not 1 <= len(a_list) <= 12:
        raise IllegalParameters("need 1 <= m <= 12")
    if not is_pte(a_list, b_list):
        raise IllegalParameters("lists are not a Prouhet-Tarry-Escott solution")
    if n % 2:
        return _illegal("pte", n, params, "requires even n")
    config = RootConfig.of(n, list(a_list) + [b + n // 2 for b in b_list])
    value = eval_magnitude(config, 30)
    if eval_magnitude(config, 40).value < 1e-35:
        return _illegal("pte", n, params, "sum vanishes")
    return FamilyBound("pte", n, params, value, config, True)


# -------------------------------------------------------------- envelope

def family_bound(family: str, n: int, params: Sequence = ()) -> FamilyBound:
    params = tuple(params)
    if family == "z5-fib":
        if n < 25:
            return _illegal(family, n, params, "requires n >= 25")
        return thm1_bound(n)
    if family == "z5-dip":
        a, b = params if params else (13, -21)
        return dip_bound(n, a, b)
    if family == "z3i":
        a, b = params if params else (13, -15)
        return z3i_bound(n, a, b)
    if family == "lift6":
        return lift6_bound(n)
    if family == "z3r-quad":
        return z3r_quad_bound(n, params[0] if params else None)
    if family == "pte":
        m = params[0] if params else 2
        best = None
        for a, b in pte_table().get(m, []):
            fb = pte_sum(a, b, n)
            if fb.legal and (best is None or fb.value.value < best.value.value):
                best = fb
        return best if best is not None else _illegal(family, n, params,
                                                      "requires even n and a table entry")
    raise IllegalParameters(f"unknown family {family!r}")


def envelope(family: str, n_from: int, n_to: int, filter_mod: tuple[int, int] | None = None,
             params: Sequence = (), step: int = 1) -> Iterator[FamilyBound]:
    """Per-n bounds of one family over a range (optionally restricted to n = r mod m)."""
    if family not in FAMILIES:
        raise IllegalParameters(f"unknown family {family!r}")
    ns = [n for n in range(n_from, n_to + 1, step)
          if filter_mod is None or n % filter_mod[0] == filter_mod[1] % filter_mod[0]]
    if not ns:
        raise ValueError("empty range")
    for n in ns:
        yield family_bound(family, n, params)
