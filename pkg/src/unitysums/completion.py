"""Optimal completion of a partial sum by two n-th roots.

Two roots combine as ``e(u/n) + e(v/n) = 2 cos(pi d / n) e(s / 2n)`` with
``s = u + v`` and ``d = v - u``.  For a line direction ``w_s = e(s/2n)`` the
partial sum ``y`` splits into a component ``p`` along the line and ``q``
across it, and the completed total is ``sqrt((p + 2cos(pi d/n))**2 + q**2)``.
So ``|q|`` bounds every completion on that line from below, and on a line
the best ``d`` comes straight from an arccos.

Lines are indexed by ``s`` mod ``n`` (the amplitude ``2cos(pi d/n)`` with
``d`` in ``[0, n]`` takes both signs), which makes ``(s, d)`` with
``s = d (mod 2)`` a bijection onto unordered pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from .angles import RootConfig, is_vanishing, trig_table
from .errors import CostGuardExceeded

# ties are broken on totals quantized to this grid, then on (u, v)
TIE_QUANTUM = 1e-13
ORACLE_MAX_N = 5000
MAX_M = 32


@dataclass(frozen=True)
class CompletionCandidate:
    u: int
    v: int
    total: float
    vanishing: bool


@lru_cache(maxsize=64)
def half_step_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Table of ``e(m / 2n)`` for ``m in [0, 2n)``; root ``e(j/n)`` sits at ``2j``."""
    c, s = trig_table(2 * n)
    c.setflags(write=False)
    s.setflags(write=False)
    return c, s


@njit(cache=True, nogil=True, inline="always")
def _tie_key(t):
    return np.int64(math.floor(t / 1e-13 + 0.5))


@njit(cache=True, nogil=True)
def d_bounds(p, h, n):
    """Integer ``d`` range (inclusive, padded by one) with ``|p + 2cos(pi d/n)| <= h``."""
    hi_c = (-p + h) / 2.0
    lo_c = (-p - h) / 2.0
    if hi_c < -1.0 - 1e-12 or lo_c > 1.0 + 1e-12:
        return 1, 0
    hi_c = min(1.0, max(-1.0, hi_c))
    lo_c = min(1.0, max(-1.0, lo_c))
    d_lo = int(math.floor(n / math.pi * math.acos(hi_c))) - 1
    d_hi = int(math.ceil(n / math.pi * math.acos(lo_c))) + 1
    if d_lo < 0:
        d_lo = 0
    if d_hi > n:
        d_hi = n
    return d_lo, d_hi


@njit(cache=True, nogil=True)
def _insert(top_t, top_k, top_u, top_v, count, M, t, u, v):
    key = _tie_key(t)
    for i in range(count):
        if top_u[i] == u and top_v[i] == v:
            return count
    if count == M:
        last = M - 1
        if (key > top_k[last] or (key == top_k[last] and
                                  (u > top_u[last] or (u == top_u[last] and v >= top_v[last])))):
            return count
        pos = last
    else:
        pos = count
        count += 1
    while pos > 0:
        j = pos - 1
        if (top_k[j] > key or (top_k[j] == key and
                               (top_u[j] > u or (top_u[j] == u and top_v[j] > v)))):
            top_t[pos] = top_t[j]
            top_k[pos] = top_k[j]
            top_u[pos] = top_u[j]
            top_v[pos] = top_v[j]
            pos = j
        else:
            break
    top_t[pos] = t
    top_k[pos] = key
    top_u[pos] = u
    top_v[pos] = v
    return count


@njit(cache=True, nogil=True)
def _consider_line(yr, yi, n, c2, s2, sm, h_cap, top_t, top_k, top_u, top_v, count, M,
                   d_center, window):
    """Push candidates of line ``sm`` into the top-M arrays.

    With ``window >= 0`` only ``d`` within ``window`` of ``d_center`` is tried;
    otherwise the full certified range for the current cutoff is scanned.
    """
    wc = c2[sm]
    ws = s2[sm]
    p = yr * wc + yi * ws
    q = yi * wc - yr * ws
    if window >= 0:
        lo = d_center - window
        hi = d_center + window
    else:
        if count == M:
            cut = top_t[M - 1] + 2e-13
            if abs(q) > cut:
                return count
            h = math.sqrt(max(0.0, cut * cut - q * q))
        else:
            h = h_cap
        lo, hi = d_bounds(p, h, n)
    if lo < 0:
        lo = 0
    if hi > n:
        hi = n
    if (lo - sm) % 2 != 0:
        lo += 1
    for d in range(lo, hi + 1, 2):
        u = ((sm - d) // 2) % n
        v = ((sm + d) // 2) % n
        if u > v:
            u, v = v, u
        re = yr + c2[2 * u] + c2[2 * v]
        im = yi + s2[2 * u] + s2[2 * v]
        t = math.sqrt(re * re + im * im)
        count = _insert(top_t, top_k, top_u, top_v, count, M, t, u, v)
    return count


@njit(cache=True, nogil=True)
def best_pairs(yr, yi, n, c2, s2, M, window):
    """The ``M`` best completions of ``y`` (certified), sorted by (total, u, v)."""
    top_t = np.full(M, np.inf)
    top_k = np.zeros(M, dtype=np.int64)
    top_u = np.zeros(M, dtype=np.int64)
    top_v = np.zeros(M, dtype=np.int64)
    count = 0
    ymag = math.sqrt(yr * yr + yi * yi)
    psi = math.atan2(yi, yr)
    s_star = psi * n / math.pi
    s_star = s_star - n * math.floor(s_star / n)
    h_cap = ymag + 5.0

    # rounding window around the real solution
    s0 = int(math.floor(s_star + 0.5))
    for ds in range(-window, window + 1):
        sm = (s0 + ds) % n
        wc = c2[sm]
        ws = s2[sm]
        p = yr * wc + yi * ws
        target = min(1.0, max(-1.0, -p / 2.0))
        d_star = int(math.floor(n / math.pi * math.acos(target) + 0.5))
        count = _consider_line(yr, yi, n, c2, s2, sm, h_cap, top_t, top_k, top_u, top_v,
                               count, M, d_star, window)

    # certification: sweep lines away from y in both directions; the distance
    # |y| sin(pi*dist/n) grows monotonically, so each sweep stops at the cutoff.
    # Down covers dist in [0, n/2), up covers (0, n/2]: n lines in total.
    base = int(math.floor(s_star))
    s = base
    while s_star - s < n / 2.0:
        if count == M and ymag * math.sin(math.pi * (s_star - s) / n) > top_t[M - 1] + 2e-13:
            break
        count = _consider_line(yr, yi, n, c2, s2, s % n, h_cap, top_t, top_k, top_u, top_v,
                               count, M, 0, -1)
        s -= 1
    s = base + 1
    while s - s_star <= n / 2.0:
        if count == M and ymag * math.sin(math.pi * (s - s_star) / n) > top_t[M - 1] + 2e-13:
            break
        count = _consider_line(yr, yi, n, c2, s2, s % n, h_cap, top_t, top_k, top_u, top_v,
                               count, M, 0, -1)
        s += 1
    return top_t[:count].copy(), top_u[:count].copy(), top_v[:count].copy()


def _root_sum(context: RootConfig) -> complex:
    c2, s2 = half_step_table(context.n)
    idx = [2 * a for a in context.angles]
    return complex(float(np.sum(c2[idx])), float(np.sum(s2[idx])))


def complete_pair(y: complex | None, n: int, M: int = 8, *, window: int = 2,
                  context: RootConfig | None = None) -> list[CompletionCandidate]:
    """The ``M`` pairs ``u <= v`` minimizing ``|y + e(u/n) + e(v/n)|``.

    Candidates near the real solution (a ``window`` of roundings in both the
    line index and the half-difference) are tried first; the search then
    continues over every line and ``d`` that could still beat the current
    M-th best, so the result is exact rather than heuristic.

    If ``context`` (the roots making up ``y``) is given, ``y`` may be None and
    the ``vanishing`` flag is decided exactly; otherwise it is numeric.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 1 <= M <= MAX_M:
        raise ValueError(f"M must be in [1, {MAX_M}]")
    if context is not None:
        if context.n != n:
            raise ValueError("context denominator differs from n")
        if y is None:
            y = _root_sum(context)
    y = complex(y)
    if not (math.isfinite(y.real) and math.isfinite(y.imag)):
        raise ValueError("y must be finite")
    c2, s2 = half_step_table(n)
    t, u, v = best_pairs(y.real, y.imag, n, c2, s2, M, max(0, int(window)))
    return [_candidate(int(a), int(b), float(tt), n, context) for tt, a, b in zip(t, u, v)]


def _candidate(u, v, total, n, context):
    if context is not None and context.k + 2 <= 5:
        vanishing = bool(is_vanishing(RootConfig(n, context.angles + (u, v))))
    else:
        vanishing = total < 1e-12
    return CompletionCandidate(u, v, total, vanishing)


@lru_cache(maxsize=8)
def _pair_grid(n: int):
    u, v = np.triu_indices(n)
    c2, s2 = half_step_table(n)
    return u, v, c2[2 * u] + c2[2 * v], s2[2 * u] + s2[2 * v]


def _select(totals, u, v, M):
    keys = np.floor(totals / TIE_QUANTUM + 0.5).astype(np.int64)
    if len(totals) > 4 * M:
        kth = np.partition(keys, M - 1)[M - 1]
        keep = keys <= kth
        totals, u, v, keys = totals[keep], u[keep], v[keep], keys[keep]
    order = np.lexsort((v, u, keys))[:M]
    return totals[order], u[order], v[order]


def complete_pair_oracle(y: complex | None, n: int, M: int = 8, *,
                         context: RootConfig | None = None) -> list[CompletionCandidate]:
    """Exhaustive scan over all ``n(n+1)/2`` pairs; same contract as complete_pair."""
    if n > ORACLE_MAX_N:
        raise CostGuardExceeded(f"oracle limited to n <= {ORACLE_MAX_N}")
    if not 1 <= M <= MAX_M:
        raise ValueError(f"M must be in [1, {MAX_M}]")
    if context is not None and y is None:
        y = _root_sum(context)
    y = complex(y)
    if n <= 1200:
        u, v, pr, pi_ = _pair_grid(n)
        totals = np.hypot(y.real + pr, y.imag + pi_)
        t, uu, vv = _select(totals, u, v, M)
    else:
        c2, s2 = half_step_table(n)
        cr, ci = c2[0::2], s2[0::2]
        parts = []
        for a in range(n):
            b = np.arange(a, n)
            tot = np.hypot(y.real + cr[a] + cr[b], y.imag + ci[a] + ci[b])
            parts.append(_select(tot, np.full(b.shape, a), b, M))
        t, uu, vv = _select(np.concatenate([p[0] for p in parts]),
                            np.concatenate([p[1] for p in parts]),
                            np.concatenate([p[2] for p in parts]), M)
    return [_candidate(int(a), int(b), float(tt), n, context) for tt, a, b in zip(t, uu, vv)]


def complete_pair_oracle_batch(ys, n: int, M: int = 8):
    """Oracle results for many ``y`` at once: list of ``(totals, u, v)`` arrays."""
    u, v, pr, pi_ = _pair_grid(n)
    out = []
    for y in ys:
        y = complex(y)
        out.append(_select(np.hypot(y.real + pr, y.imag + pi_), u, v, M))
    return out
