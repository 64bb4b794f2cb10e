"""Invariant report: each named property is checked and printed as PASS/FAIL."""

from __future__ import annotations

import itertools
import random
import sys
import time
from typing import Callable

from . import closed_forms, completion, constructions, search
from .angles import RootConfig, canonicalize, eval_magnitude, is_vanishing
from .store import ResultsStore

Check = Callable[[bool], bool]


def _rotation_reflection(full: bool) -> bool:
    rng = random.Random(1)
    for _ in range(200 if full else 40):
        n = rng.randint(1, 200)
        cfg = RootConfig.of(n, [rng.randrange(n) for _ in range(rng.randint(1, 8))])
        m = eval_magnitude(cfg)
        tol = 4 * m.err_bound
        if not eval_magnitude(cfg.rotated(rng.randrange(n))).close_to(m, tol):
            return False
        if not eval_magnitude(cfg.reflected()).close_to(m, tol):
            return False
        if not eval_magnitude(canonicalize(cfg)).close_to(m, tol):
            return False
    return True


def _classifier(full: bool) -> bool:
    for n in range(1, (30 if full else 10) + 1):
        seen = set()
        for nums in itertools.combinations_with_replacement(range(n), 5):
            if nums[0] != 0:
                break
            cfg = canonicalize(RootConfig(n, nums))
            if cfg in seen:
                continue
            seen.add(cfg)
            if bool(is_vanishing(cfg)) != (eval_magnitude(cfg, 40).value < 1e-35):
                return False
    return True


def _pair_completion(full: bool) -> bool:
    rng = random.Random(2)
    for _ in range(400 if full else 60):
        n = rng.randint(2, 400 if full else 80)
        y = complex(rng.uniform(-3.2, 3.2), rng.uniform(-3.2, 3.2))
        M = rng.choice((1, 4, 8))
        a = completion.complete_pair(y, n, M)
        b = completion.complete_pair_oracle(y, n, M)
        if [round(c.total, 11) for c in a] != [round(c.total, 11) for c in b]:
            return False
    return True


def _closed_forms(full: bool) -> bool:
    top = 150 if full else 40
    for k in (2, 3, 4):
        for n in range(2, top + 1):
            got = closed_forms.closed_form(k, n).value.value
            want = search.exact_min_naive(k, n).value.value
            if abs(got - want) > 1e-12 * max(1, want):
                return False
    return True


def _reduction(full: bool) -> bool:
    for n in range(5, (60 if full else 25) + 1):
        a = search.exact_min_5(n)
        b = search.exact_min_naive(5, n)
        if a.witness != b.witness or abs(a.value.value - b.value.value) > 1e-10:
            return False
    return True


def _prune(full: bool) -> bool:
    ns = range(50, 301) if full else range(50, 71, 5)
    for n in ns:
        a = search.exact_min_5(n, search.SearchOptions(prune_enabled=True))
        b = search.exact_min_5(n, search.SearchOptions(prune_enabled=False))
        if a.witness != b.witness or a.value.value != b.value.value:
            return False
    return True


def _determinism(full: bool) -> bool:
    for n in ((97, 240, 601) if full else (97,)):
        base = search.exact_min_5(n, search.SearchOptions(threads=1))
        for t in (4, 8):
            r = search.exact_min_5(n, search.SearchOptions(threads=t))
            if (r.witness, r.value.value) != (base.witness, base.value.value):
                return False
        parts = [search.exact_min_5(n, search.SearchOptions(shard=(i, 5))) for i in range(5)]
        m = search.merge_records(parts)
        if (m.witness, m.value.value) != (base.witness, base.value.value):
            return False
    return True


def _mitm(full: bool) -> bool:
    for n in range(7, (20 if full else 10) + 1):
        a = search.exact_min_mitm(6, n)
        b = search.exact_min_naive(6, n)
        if a.witness != b.witness or abs(a.value.value - b.value.value) > 1e-20:
            return False
    return True


def _lemma(full: bool) -> bool:
    for j in range(9):
        for r in range(5):
            p = constructions.fib_approx_pair(j, r)
            if p.a % 5 != r or p.b % 5 != 2 * r % 5 or p.quality <= 0:
                return False
            if abs(p.a) * p.quality > constructions.LEMMA_C0:
                return False
    fib = constructions.fib
    return all(fib(5 * j) % 5 == 0 and fib(5 * j + 1) % 5 == pow(3, j, 5)
               and fib(5 * j + 2) % 5 == pow(3, j, 5) for j in range(61))


def _series(full: bool) -> bool:
    grid = [s * x for s in (1, -1) for x in (1e-2, 1e-3, 1e-4)]
    for a, b in itertools.product(grid, grid):
        h = max(abs(a), abs(b)) ** 4
        if abs(float(constructions.z5_exact(a, b, 40)) - constructions.z5_series3(a, b)) \
                > constructions.SERIES_K5 * h:
            return False
        if abs(float(constructions.z3r_exact(a, b, 40)) - constructions.z3r_series(a, b)) \
                > constructions.SERIES_K3R * h:
            return False
    return True


def _dominance(full: bool) -> bool:
    ns = range(12, 241) if full else range(12, 61, 6)
    for n in ns:
        f = search.exact_min_5(n).value.value
        for fam in ("lift6", "z3r-quad", "z5-fib"):
            fb = constructions.family_bound(fam, n)
            if fb.legal and f > fb.value.value + 1e-12:
                return False
        # a PTE sum has 2m roots, so it bounds f(2m, n), not f(5, n)
        fb = constructions.family_bound("pte", n, (2,))
        if fb.legal and search.compute_record(4, n).value.value > fb.value.value + 1e-12:
            return False
        for ab in ((13, -15), (-32, 37)):
            fb = constructions.z3i_bound(n, *ab)
            if fb.legal and f > fb.value.value + 1e-12:
                return False
    return True


CHECKS: list[tuple[str, Check]] = [
    ("rotation/reflection invariance", _rotation_reflection),
    ("classifier soundness and completeness", _classifier),
    ("pair completion oracle equivalence", _pair_completion),
    ("closed-form oracle equivalence", _closed_forms),
    ("reduction soundness", _reduction),
    ("prune soundness", _prune),
    ("determinism", _determinism),
    ("meet-in-the-middle equivalence", _mitm),
    ("fibonacci lemma", _lemma),
    ("series remainders", _series),
    ("family dominance", _dominance),
]


def run_verify(level: str = "quick", store_path: str | None = None, out=None) -> int:
    """Run every check; returns 0 when all pass, 1 otherwise.

    A store that cannot be parsed raises StoreError (the CLI maps it to exit 3).
    """
    out = out or sys.stdout
    full = level == "full"
    if store_path is not None:
        ResultsStore(store_path)
    failed = 0
    for name, check in CHECKS:
        t0 = time.perf_counter()
        try:
            ok = bool(check(full))
        except Exception as exc:  # a crashing check is a failing check
            ok = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}  [{time.perf_counter() - t0:.1f}s]", file=out)
    print(f"{len(CHECKS) - failed}/{len(CHECKS)} invariants hold", file=out)
    return 1 if failed else 0
