"""Command-line interface: ``unitysums {exact,sweep,construct,plotdata,verify,closed-form}``.

Exit codes: 0 ok, 1 failed invariant, 2 bad arguments, 3 I/O error,
4 cost guard refused, 5 empty selection.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import math
import sys

from . import constructions, search
from .closed_forms import closed_form
from .errors import BelowThreshold, CostGuardExceeded, IllegalParameters, UnsupportedK
from .plotdata import TRANSFORMS, EmptySelection, build_series
from .store import HEADER, ResultsStore, StoreError, format_row, format_value

EXIT_OK, EXIT_FAIL, EXIT_ARGS, EXIT_IO, EXIT_COST, EXIT_EMPTY = 0, 1, 2, 3, 4, 5


class ArgError(Exception):
    pass


def _mod(text: str) -> tuple[int, int]:
    try:
        m, r = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected m,r") from None
    if m < 1:
        raise argparse.ArgumentTypeError("modulus must be >= 1")
    return m, r % m


def _ns(args) -> list[int]:
    if args.n is not None:
        if args.n_from is not None or args.n_to is not None:
            raise ArgError("give either --n or --from/--to")
        ns = [args.n]
    else:
        if args.n_from is None or args.n_to is None:
            raise ArgError("give --n or both --from and --to")
        if args.stride < 1:
            raise ArgError("stride must be >= 1")
        if args.n_to < args.n_from:
            raise ArgError("empty range")
        ns = list(range(args.n_from, args.n_to + 1, args.stride))
    if args.mod is not None:
        ns = [n for n in ns if n % args.mod[0] == args.mod[1]]
    if not ns or min(ns) < 1:
        raise ArgError("no valid n selected")
    return ns


def _log(path, message: str):
    """Timestamps live only in the sidecar log, never in result files."""
    if path is None:
        return
    stamp = datetime.datetime.now().isoformat(timespec="seconds")
    with open(f"{path}.log", "a") as fh:
        fh.write(f"{stamp} {message}\n")


def cmd_exact(args) -> int:
    if not 1 <= args.k <= 8:
        raise ArgError("k must be in [1, 8]")
    ns = _ns(args)
    opts = search.SearchOptions(threads=args.threads or search.default_threads(),
                                refine_digits=args.refine_digits)
    store = ResultsStore(args.out) if args.out else None
    if store is not None and not args.resume:
        clash = [n for n in ns if store.has(args.k, n)]
        if clash:
            raise ArgError(f"{args.out} already has k={args.k} rows (n={clash[0]}...); "
                           "use --resume")
    skipped = computed = 0
    for n in ns:
        if store is not None and store.has(args.k, n):
            skipped += 1
            continue
        rec = search.compute_record(args.k, n, opts)
        computed += 1
        if store is None:
            if computed == 1:
                sys.stdout.write(",".join(HEADER) + "\n")
            sys.stdout.write(format_row(rec))
        else:
            store.append(rec)
    print(f"computed {computed}, skipped {skipped}", file=sys.stderr)
    _log(args.out, f"exact k={args.k} computed={computed} skipped={skipped}")
    return EXIT_OK


def _dip_window(j: int) -> tuple[int, int, tuple[int, int]]:
    d = constructions.dip_locate(j)
    half = max(700.0, 0.015 * d.n0)
    lo = 500 * math.floor((d.n0 - half) / 500)
    hi = 500 * math.ceil((d.n0 + half) / 500)
    return lo, hi, (d.a, d.b)


def cmd_construct(args) -> int:
    fam = args.family
    if fam not in constructions.FAMILIES:
        raise ArgError(f"unknown family {fam!r}; choose from {', '.join(constructions.FAMILIES)}")
    params: tuple = ()
    step = args.stride
    mod = args.mod
    if fam == "z5-dip":
        if args.j is not None:
            lo, hi, params = _dip_window(args.j)
            if args.window:
                args.n_from, args.n_to = lo, hi
                step = 5
                mod = mod or (5, 0)
        if args.a is not None:
            params = (args.a, args.b)
    elif fam == "z3i":
        if args.a is None or args.b is None:
            raise ArgError("z3i needs --a and --b")
        params = (args.a, args.b)
    elif fam == "z3r-quad" and args.Q is not None:
        params = (args.Q,)
    elif fam == "pte":
        params = (args.m,)
    args.stride, args.mod = step, mod
    if args.window and fam != "z5-dip":
        raise ArgError("--window applies to z5-dip only")
    ns = _ns(args)
    rows = [constructions.family_bound(fam, n, params) for n in ns]
    if not any(r.legal for r in rows):
        raise ArgError(f"family {fam} is not legal anywhere in the selected range")
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "value", "params", "legal"])
        for r in rows:
            value = format_value(r.value.value, 20) if r.legal else ""
            w.writerow([r.n, value, " ".join(str(p) for p in r.params), int(r.legal)])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_plotdata(args) -> int:
    store = ResultsStore(args.store)
    if not store.path.exists():
        raise StoreError(f"{args.store} does not exist")
    series = build_series(store.rows, args.k, args.transform, tuple(args.overlay or ()),
                          args.mod)
    text = series.to_text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_verify

    return run_verify(args.level, args.store)


def cmd_closed_form(args) -> int:
    res = closed_form(args.k, args.n, args.digits)
    print(f"f({res.k},{res.n}) = {format_value(res.value.value, args.digits)}  "
          f"witness {res.witness}  [{res.regime}]")
    return EXIT_OK


def _add_range(p):
    p.add_argument("--n", type=int)
    p.add_argument("--from", dest="n_from", type=int)
    p.add_argument("--to", dest="n_to", type=int)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--mod", type=_mod, help="keep n = r (mod m), given as m,r")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="unitysums", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    for name in ("exact", "sweep"):
        p = sub.add_parser(name, help="exact minima f(k, n) as CSV rows")
        p.add_argument("--k", type=int, required=True)
        _add_range(p)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--refine-digits", type=int, default=30)
        p.add_argument("--out", help="results CSV (append-only); stdout if omitted")
        p.add_argument("--resume", action="store_true", help="skip (k, n) already in --out")
        p.set_defaults(func=cmd_exact)

    p = sub.add_parser("construct", help="constructive upper bounds of one family")
    p.add_argument("--family", required=True)
    _add_range(p)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--Q", type=int)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--window", action="store_true", help="z5-dip: the window around the dip")
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("plotdata", help="plot-ready columns from a results store")
    p.add_argument("--store", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--transform", choices=TRANSFORMS, default="ln")
    p.add_argument("--overlay", action="append", choices=constructions.FAMILIES)
    p.add_argument("--mod", type=_mod)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plotdata)

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.add_argument("--store", help="also check that this results store parses")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("closed-form", help="f(k, n) for k in 2..4 from the closed forms")
    p.add_argument("--k", type=int, required=True, choices=(2, 3, 4))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--digits", type=int, default=30)
    p.set_defaults(func=cmd_closed_form)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except EmptySelection as exc:
        print(f"empty selection: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (ArgError, UnsupportedK, IllegalParameters, BelowThreshold, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (StoreError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CostGuardExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_COST


if __name__ == "__main__":
    sys.exit(main())
