"""Exact minima f(k, n): naive oracle, arc-reduced k=5 search, meet-in-the-middle.

All three engines share a two-stage scheme.  Stage 1 runs in float64 over
precomputed root tables and collects every configuration whose total is
within ``refine_margin`` (relative) plus ``stage1_slack(k)`` (absolute) of the
running minimum.  Stage 2 canonicalizes those survivors, re-evaluates them
with ``eval_magnitude`` and picks the minimum; exact ties go to the
lexicographically least canonical witness.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np
from numba import njit

from .angles import (Magnitude, RootConfig, canonicalize, eval_magnitude, is_vanishing,
                     vanishes_sorted)
from .completion import best_pairs, d_bounds, half_step_table
from .errors import CostGuardExceeded, InvalidConfig, UnsupportedK

NAIVE_COST_LIMIT = 1e9
MITM_MAX_N = 2000
MITM_MAX_S = 5_000_000
MITM_BUCKETS = 4096
# float totals below this are checked for exact vanishing
ZERO_SCREEN = 1e-9
# k >= 6 has no exact classifier: 40-digit values below this count as zero
NUMERIC_ZERO = 1e-35
STAGE1_DIGITS = 15


def stage1_slack(k: int) -> float:
    """Absolute slack covering float64 error of a k-term unit sum (~k^2 ulps)."""
    return 4e-15 * k * k


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("UNITY_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SearchOptions:
    threads: int = field(default_factory=default_threads)
    refine_digits: int = 30
    refine_margin: float = 1 + 1e-6
    prune_enabled: bool = True
    shard: tuple[int, int] = (0, 1)

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if not self.refine_margin > 1:
            raise ValueError("refine_margin must exceed 1")
        idx, total = self.shard
        if total < 1 or not 0 <= idx < total:
            raise ValueError(f"invalid shard {self.shard}")


@dataclass(frozen=True)
class MinRecord:
    k: int
    n: int
    value: Magnitude
    witness: RootConfig
    stage1_digits: int = STAGE1_DIGITS
    stage2_digits: int = 30
    pruned_count: int = 0
    evaluated_count: int = 0

    def key(self):
        return (self.k, self.n)


# ---------------------------------------------------------------- buffers

@njit(cache=True, nogil=True)
def _compact(nums, tot, count, thr):
    j = 0
    for i in range(count):
        if tot[i] <= thr:
            if i != j:
                nums[j, :] = nums[i, :]
                tot[j] = tot[i]
            j += 1
    return j


@njit(cache=True, nogil=True)
def _ensure_room(nums, tot, count, thr):
    if count < tot.shape[0]:
        return nums, tot, count
    count = _compact(nums, tot, count, thr)
    if count * 2 < tot.shape[0]:
        return nums, tot, count
    nn = np.empty((2 * tot.shape[0], nums.shape[1]), dtype=np.int64)
    nt = np.empty(2 * tot.shape[0])
    nn[:count, :] = nums[:count, :]
    nt[:count] = tot[:count]
    return nn, nt, count


# ---------------------------------------------------------------- naive

@njit(cache=True, nogil=True)
def _naive_scan(n, k, cr, ci, margin, slack, zero_screen, exact_zero):
    idx = np.zeros(k, dtype=np.int64)
    pre_r = np.zeros(k + 1)
    pre_i = np.zeros(k + 1)
    nums = np.empty((256, k), dtype=np.int64)
    tot = np.empty(256)
    count = 0
    sus_nums = np.empty((64, k), dtype=np.int64)
    sus_tot = np.empty(64)
    sus_count = 0
    best = np.inf
    thr = np.inf
    evaluated = 0
    for j in range(k):
        pre_r[j + 1] = pre_r[j] + cr[0]
        pre_i[j + 1] = pre_i[j] + ci[0]
    while True:
        evaluated += 1
        t = math.sqrt(pre_r[k] * pre_r[k] + pre_i[k] * pre_i[k])
        handled = False
        if t < zero_screen:
            if exact_zero:
                if vanishes_sorted(idx, n):
                    handled = True
            else:
                sus_nums, sus_tot, sus_count = _ensure_room(sus_nums, sus_tot, sus_count, np.inf)
                sus_nums[sus_count, :] = idx
                sus_tot[sus_count] = t
                sus_count += 1
                handled = True
        if not handled and t <= thr:
            nums, tot, count = _ensure_room(nums, tot, count, thr)
            nums[count, :] = idx
            tot[count] = t
            count += 1
            if t < best:
                best = t
                thr = best * margin + slack
        j = k - 1
        while j >= 1 and idx[j] == n - 1:
            j -= 1
        if j == 0:
            break
        idx[j] += 1
        for m in range(j + 1, k):
            idx[m] = idx[j]
        for m in range(j, k):
            pre_r[m + 1] = pre_r[m] + cr[idx[m]]
            pre_i[m + 1] = pre_i[m] + ci[idx[m]]
    count = _compact(nums, tot, count, thr)
    return nums[:count].copy(), tot[:count].copy(), sus_nums[:sus_count].copy(), \
        sus_tot[:sus_count].copy(), evaluated


def _naive_cost(k: int, n: int) -> float:
    return n ** (k - 1) / math.factorial(k - 1)


def _numeric_zero(config: RootConfig) -> bool:
    return eval_magnitude(config, 40).value < NUMERIC_ZERO


def _finalize(k, n, nums, tots, opts: SearchOptions):
    """Stage 2: refine near-minimal float candidates; returns (Magnitude, witness)."""
    if len(tots) == 0:
        raise RuntimeError(f"no nonvanishing configuration found for k={k}, n={n}")
    best1 = float(np.min(tots))
    thr = best1 * opts.refine_margin + stage1_slack(k)
    pool = {canonicalize(RootConfig.of(n, row)) for row, t in zip(nums, tots) if t <= thr}
    refined = [(eval_magnitude(cfg, opts.refine_digits), cfg) for cfg in pool]
    top = min(m.value for m, _ in refined)
    tol = 4 * max(m.err_bound for m, _ in refined)
    tied = [(cfg.angles, m, cfg) for m, cfg in refined if m.value - top <= tol]
    tied.sort(key=lambda item: item[0])
    _, mag, witness = tied[0]
    return mag, witness


def exact_min_naive(k: int, n: int, opts: SearchOptions | None = None) -> MinRecord:
    """Minimum nonzero ``|sum of k n-th roots|`` by exhausting multisets containing 0."""
    opts = opts or SearchOptions()
    if not 1 <= k <= 7:
        raise UnsupportedK(f"naive search supports k in [1, 7], got {k}")
    if n < 1:
        raise InvalidConfig("n must be >= 1")
    if _naive_cost(k, n) > NAIVE_COST_LIMIT:
        raise CostGuardExceeded(f"naive search for k={k}, n={n} exceeds the cost guard")
    c2, s2 = half_step_table(n)
    cr = np.ascontiguousarray(c2[0::2])
    ci = np.ascontiguousarray(s2[0::2])
    nums, tots, sus_nums, sus_tots, evaluated = _naive_scan(
        n, k, cr, ci, opts.refine_margin, stage1_slack(k), ZERO_SCREEN, k <= 5)
    if len(sus_tots):
        keep = [i for i, row in enumerate(sus_nums) if not _numeric_zero(RootConfig.of(n, row))]
        if keep:
            nums = np.vstack([nums, sus_nums[keep]])
            tots = np.concatenate([tots, sus_tots[keep]])
    mag, witness = _finalize(k, n, nums, tots, opts)
    return MinRecord(k, n, mag, witness, stage2_digits=opts.refine_digits,
                     evaluated_count=int(evaluated))


# ---------------------------------------------------------------- k = 5

def arc_limit(n: int) -> int:
    """Upper end of the arc for the third root: ceil(2n/5), a safe superset of 2n/5."""
    return -(-2 * n // 5)


@njit(cache=True, nogil=True)
def _ymag(a, b, c2, s2):
    yr = 1.0 + c2[2 * a] + c2[2 * b]
    yi = s2[2 * a] + s2[2 * b]
    return math.sqrt(yr * yr + yi * yi)


@njit(cache=True, nogil=True)
def first_unpruned_b(a, b_max, c2, s2, limit):
    """Least ``b`` in ``[2a, b_max]`` with ``|1 + e(a/n) + e(b/n)| <= limit``.

    Relies on the modulus being nonincreasing in ``b`` on that range.
    """
    lo = 2 * a
    hi = b_max + 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _ymag(a, mid, c2, s2) <= limit:
            hi = mid
        else:
            lo = mid + 1
    return lo


@njit(cache=True, nogil=True)
def _arc_scan(n, a_lo, a_hi, b_max, c2, s2, thr0, margin, slack, prune, zero_screen):
    nums = np.empty((256, 5), dtype=np.int64)
    tot = np.empty(256)
    count = 0
    best = np.inf
    thr = thr0
    evaluated = 0
    pruned = 0
    vals = np.empty(5, dtype=np.int64)
    half = n / 2.0
    for a in range(a_lo, a_hi):
        if 2 * a > b_max:
            break
        b0 = 2 * a
        if prune:
            b0 = first_unpruned_b(a, b_max, c2, s2, 2.0 + thr)
            pruned += b0 - 2 * a
        ca = c2[2 * a]
        sa = s2[2 * a]
        for b in range(b0, b_max + 1):
            yr = 1.0 + ca + c2[2 * b]
            yi = sa + s2[2 * b]
            evaluated += 1
            ymag = math.sqrt(yr * yr + yi * yi)
            s_star = math.atan2(yi, yr) * n / math.pi
            s_star -= n * math.floor(s_star / n)
            base = int(math.floor(s_star))
            for direction in range(2):
                s = base if direction == 0 else base + 1
                while True:
                    dist = s_star - s if direction == 0 else s - s_star
                    if (direction == 0 and dist >= half) or (direction == 1 and dist > half):
                        break
                    if ymag * math.sin(math.pi * dist / n) > thr:
                        break
                    sm = s % n
                    s = s - 1 if direction == 0 else s + 1
                    wc = c2[sm]
                    ws = s2[sm]
                    p = yr * wc + yi * ws
                    q = yi * wc - yr * ws
                    if abs(q) > thr:
                        continue
                    h = math.sqrt(thr * thr - q * q)
                    d_lo, d_hi = d_bounds(p, h, n)
                    if (d_lo - sm) % 2 != 0:
                        d_lo += 1
                    for d in range(d_lo, d_hi + 1, 2):
                        u = ((sm - d) // 2) % n
                        v = ((sm + d) // 2) % n
                        re = yr + c2[2 * u] + c2[2 * v]
                        im = yi + s2[2 * u] + s2[2 * v]
                        t = math.sqrt(re * re + im * im)
                        if t > thr:
                            continue
                        if t < zero_screen:
                            vals[0] = 0
                            vals[1] = a
                            vals[2] = b
                            vals[3] = u
                            vals[4] = v
                            vals.sort()
                            if vanishes_sorted(vals, n):
                                continue
                        nums, tot, count = _ensure_room(nums, tot, count, thr)
                        nums[count, 0] = 0
                        nums[count, 1] = a
                        nums[count, 2] = b
                        nums[count, 3] = u
                        nums[count, 4] = v
                        tot[count] = t
                        count += 1
                        if t < best:
                            best = t
                            nt = best * margin + slack
                            if nt < thr:
                                thr = nt
    count = _compact(nums, tot, count, thr)
    return nums[:count].copy(), tot[:count].copy(), best, evaluated, pruned


def _seed_bound(n: int, b_max: int, c2, s2) -> tuple[float, tuple[int, ...] | None]:
    """A valid upper bound on f(5, n) from a few triples near the regular pentagon,
    with the configuration attaining it."""
    best, row = math.inf, None
    a_max = b_max // 2
    probes = {(0, b_max)}
    for da in range(-2, 3):
        for db in range(-2, 3):
            a = round(n / 5) + da
            b = round(2 * n / 5) + db
            if 0 <= a and 2 * a <= b <= b_max and a <= a_max:
                probes.add((a, b))
    for a, b in sorted(probes):
        yr = 1.0 + c2[2 * a] + c2[2 * b]
        yi = s2[2 * a] + s2[2 * b]
        t, u, v = best_pairs(yr, yi, n, c2, s2, 8, 2)
        for tt, uu, vv in zip(t, u, v):
            cfg = (0, a, b, int(uu), int(vv))
            if not is_vanishing(RootConfig.of(n, cfg)):
                if float(tt) < best:
                    best, row = float(tt), cfg
                break
    return best, row


def _split_by_work(a_lo: int, a_hi: int, b_max: int, parts: int,
                   keep_empty: bool = False) -> list[tuple[int, int]]:
    """Split ``[a_lo, a_hi)`` into ``parts`` contiguous ranges of similar triple counts.

    With ``keep_empty`` exactly ``parts`` ranges are returned, some possibly empty.
    """
    if parts <= 1 or a_hi - a_lo <= 1:
        return [(a_lo, a_hi)] + [(a_hi, a_hi)] * (parts - 1 if keep_empty else 0)
    work = np.array([max(0, b_max - 2 * a + 1) for a in range(a_lo, a_hi)], dtype=float)
    cum = np.concatenate([[0.0], np.cumsum(work)])
    cuts = [a_lo]
    for j in range(1, parts):
        cuts.append(a_lo + int(np.searchsorted(cum, cum[-1] * j / parts)))
    cuts.append(a_hi)
    if not keep_empty:
        cuts = sorted(set(cuts))
    return list(zip(cuts[:-1], cuts[1:]))


def exact_min_5(n: int, opts: SearchOptions | None = None) -> MinRecord:
    """f(5, n) by exhausting optimal two-root completions of arc-reduced triples.

    Every 5-multiset is a rotation/reflection of one containing
    ``{0, a, b}`` with ``0 <= 2a <= b <= 2n/5``.  For each such triple every
    completion within the refine threshold is enumerated exactly, so the
    search is complete; with pruning, triples with ``|y| > 2 + threshold``
    are skipped by binary search since ``|y|`` is nonincreasing in ``b``.
    """
    opts = opts or SearchOptions()
    if n < 5:
        raise InvalidConfig("exact_min_5 requires n >= 5")
    c2, s2 = half_step_table(n)
    b_max = arc_limit(n)
    a_end = b_max // 2 + 1
    slack = stage1_slack(5)
    seed, seed_row = _seed_bound(n, b_max, c2, s2)
    thr0 = seed * opts.refine_margin + slack
    idx, total = opts.shard
    shard_lo, shard_hi = _split_by_work(0, a_end, b_max, total, keep_empty=True)[idx]
    ranges = _split_by_work(shard_lo, shard_hi, b_max, opts.threads)

    def run(r):
        return _arc_scan(n, r[0], r[1], b_max, c2, s2, thr0, opts.refine_margin, slack,
                         opts.prune_enabled, ZERO_SCREEN)

    if opts.threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=opts.threads) as pool:
            results = list(pool.map(run, ranges))
    else:
        results = [run(r) for r in ranges]
    nums = np.vstack([r[0] for r in results])
    tots = np.concatenate([r[1] for r in results])
    if seed_row is not None:
        # a shard may hold nothing under the global seed; the seed itself is a valid answer
        nums = np.vstack([nums, np.array([seed_row], dtype=np.int64)])
        tots = np.append(tots, seed)
    evaluated = sum(int(r[3]) for r in results)
    pruned = sum(int(r[4]) for r in results)
    mag, witness = _finalize(5, n, nums, tots, opts)
    return MinRecord(5, n, mag, witness, stage2_digits=opts.refine_digits,
                     pruned_count=pruned, evaluated_count=evaluated)


def merge_records(records: Iterable[MinRecord]) -> MinRecord:
    """Deterministic min-merge of partial results (e.g. shards) for one (k, n)."""
    records = list(records)
    if not records:
        raise ValueError("nothing to merge")
    if len({r.key() for r in records}) != 1:
        raise ValueError("records for different (k, n) cannot be merged")
    top = min(r.value.value for r in records)
    tol = 4 * max(r.value.err_bound for r in records)
    tied = sorted((r for r in records if r.value.value - top <= tol),
                  key=lambda r: r.witness.angles)
    win = tied[0]
    return MinRecord(win.k, win.n, win.value, win.witness, win.stage1_digits,
                     win.stage2_digits, sum(r.pruned_count for r in records),
                     sum(r.evaluated_count for r in records))


# ---------------------------------------------------------------- MITM

@njit(cache=True, nogil=True)
def _multisets(n, m, first_zero):
    """All nondecreasing m-tuples over [0, n) (first entry 0 if first_zero)."""
    total = 1
    free = m - 1 if first_zero else m
    # C(n + free - 1, free)
    for j in range(free):
        total = total * (n + j) // (j + 1)
    out = np.zeros((total, m), dtype=np.int64)
    idx = np.zeros(m, dtype=np.int64)
    start = 1 if first_zero else 0
    row = 0
    while True:
        out[row, :] = idx
        row += 1
        j = m - 1
        while j >= start and idx[j] == n - 1:
            j -= 1
        if j < start:
            break
        idx[j] += 1
        for l in range(j + 1, m):
            idx[l] = idx[j]
    return out


@njit(cache=True, nogil=True)
def _mitm_scan(n, k, s_tuples, s_re, s_im, s_mag, bucket_start, nb, l_tuples, cr, ci,
               margin, slack, zero_screen):
    h = s_tuples.shape[1]
    l = l_tuples.shape[1]
    nums = np.empty((256, k), dtype=np.int64)
    tot = np.empty(256)
    count = 0
    sus_nums = np.empty((64, k), dtype=np.int64)
    sus_tot = np.empty(64)
    sus_count = 0
    best = np.inf
    thr = np.inf
    evaluated = 0
    width = 2 * math.pi / nb
    for r in range(l_tuples.shape[0]):
        qr = 0.0
        qi = 0.0
        for j in range(l):
            qr += cr[l_tuples[r, j]]
            qi += ci[l_tuples[r, j]]
        qm = math.sqrt(qr * qr + qi * qi)
        # S stores negated sums: we need S-points near the query itself
        if qm <= thr or not math.isfinite(thr):
            b_first = 0
            b_count = nb
        else:
            half_angle = math.asin(min(1.0, thr / qm))
            ang = math.atan2(qi, qr)
            if ang < 0:
                ang += 2 * math.pi
            b_first = int(math.floor((ang - half_angle) / width)) - 1
            b_count = int(math.floor((ang + half_angle) / width)) + 1 - b_first + 1
            if b_count > nb:
                b_first = 0
                b_count = nb
        for bi in range(b_count):
            bk = (b_first + bi) % nb
            lo = bucket_start[bk]
            hi = bucket_start[bk + 1]
            if lo == hi:
                continue
            if math.isfinite(thr):
                lo = lo + np.searchsorted(s_mag[lo:hi], qm - thr)
                hi = bucket_start[bk] + np.searchsorted(s_mag[bucket_start[bk]:hi], qm + thr,
                                                        side="right")
            for i in range(lo, hi):
                dr = qr - s_re[i]
                di = qi - s_im[i]
                t = math.sqrt(dr * dr + di * di)
                evaluated += 1
                if t > thr:
                    continue
                if t < zero_screen:
                    sus_nums, sus_tot, sus_count = _ensure_room(sus_nums, sus_tot, sus_count,
                                                                np.inf)
                    sus_nums[sus_count, :h] = s_tuples[i]
                    sus_nums[sus_count, h:] = l_tuples[r]
                    sus_tot[sus_count] = t
                    sus_count += 1
                    continue
                nums, tot, count = _ensure_room(nums, tot, count, thr)
                nums[count, :h] = s_tuples[i]
                nums[count, h:] = l_tuples[r]
                tot[count] = t
                count += 1
                if t < best:
                    best = t
                    thr = best * margin + slack
    count = _compact(nums, tot, count, thr)
    return nums[:count].copy(), tot[:count].copy(), sus_nums[:sus_count].copy(), \
        sus_tot[:sus_count].copy(), evaluated


def exact_min_mitm(k: int, n: int, opts: SearchOptions | None = None) -> MinRecord:
    """f(k, n) for k in [6, 8] by matching sums of floor(k/2) roots against
    negated sums of ceil(k/2) roots (first fixed at 1), bucketed by angle."""
    opts = opts or SearchOptions()
    if not 6 <= k <= 8:
        raise UnsupportedK(f"meet-in-the-middle supports k in [6, 8], got {k}")
    if not 1 <= n <= MITM_MAX_N:
        raise CostGuardExceeded(f"meet-in-the-middle limited to n <= {MITM_MAX_N}")
    h, l = -(-k // 2), k // 2
    if math.comb(n + h - 2, h - 1) > MITM_MAX_S:
        raise CostGuardExceeded("table of half-sums exceeds the memory guard")
    c2, s2 = half_step_table(n)
    cr = np.ascontiguousarray(c2[0::2])
    ci = np.ascontiguousarray(s2[0::2])
    s_tuples = _multisets(n, h, True)
    s_re = -cr[s_tuples].sum(axis=1)
    s_im = -ci[s_tuples].sum(axis=1)
    ang = np.mod(np.arctan2(s_im, s_re), 2 * np.pi)
    bucket = np.minimum((ang / (2 * np.pi / MITM_BUCKETS)).astype(np.int64), MITM_BUCKETS - 1)
    mag = np.hypot(s_re, s_im)
    order = np.lexsort((mag, bucket))
    s_tuples, s_re, s_im, mag, bucket = (s_tuples[order], s_re[order], s_im[order],
                                         mag[order], bucket[order])
    bucket_start = np.searchsorted(bucket, np.arange(MITM_BUCKETS + 1))
    l_tuples = _multisets(n, l, False)
    nums, tots, sus_nums, sus_tots, evaluated = _mitm_scan(
        n, k, s_tuples, s_re, s_im, mag, bucket_start, MITM_BUCKETS, l_tuples, cr, ci,
        opts.refine_margin, stage1_slack(k), ZERO_SCREEN)
    if len(sus_tots):
        seen = {}
        for i, row in enumerate(sus_nums):
            cfg = canonicalize(RootConfig.of(n, row))
            if cfg not in seen:
                seen[cfg] = (i, _numeric_zero(cfg))
        keep = [i for i, zero in seen.values() if not zero]
        if keep:
            nums = np.vstack([nums, sus_nums[keep]])
            tots = np.concatenate([tots, sus_tots[keep]])
    mag_, witness = _finalize(k, n, nums, tots, opts)
    return MinRecord(k, n, mag_, witness, stage2_digits=opts.refine_digits,
                     evaluated_count=int(evaluated))


# ---------------------------------------------------------------- sweep

def compute_record(k: int, n: int, opts: SearchOptions | None = None) -> MinRecord:
    """One f(k, n) record, choosing the engine by k and n."""
    from .closed_forms import closed_form_record

    opts = opts or SearchOptions()
    if k <= 4:
        rec = closed_form_record(k, n, opts.refine_digits)
        if rec is not None:
            return rec
        return exact_min_naive(k, n, opts)
    if k == 5:
        return exact_min_5(n, opts) if n >= 5 else exact_min_naive(5, n, opts)
    if k <= 8:
        if k <= 7 and _naive_cost(k, n) <= 1e6:
            return exact_min_naive(k, n, opts)
        return exact_min_mitm(k, n, opts)
    raise UnsupportedK(f"k={k} outside [1, 8]")


def sweep_ns(n_from: int, n_to: int, stride: int = 1,
             filter_mod: tuple[int, int] | None = None) -> list[int]:
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if n_to < n_from:
        raise ValueError("empty range")
    ns = range(n_from, n_to + 1, stride)
    if filter_mod is not None:
        m, r = filter_mod
        ns = [n for n in ns if n % m == r % m]
    return list(ns)


def sweep(k: int, n_from: int, n_to: int, stride: int = 1,
          filter_mod: tuple[int, int] | None = None, opts: SearchOptions | None = None,
          store=None) -> Iterator[MinRecord]:
    """Yield records for each selected n; with a store, skip present (k, n) and append."""
    for n in sweep_ns(n_from, n_to, stride, filter_mod):
        if store is not None and store.has(k, n):
            continue
        rec = compute_record(k, n, opts)
        if store is not None:
            store.append(rec)
        yield rec
