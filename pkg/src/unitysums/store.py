"""Results CSV: canonical row formatting and an append-only store with resume."""

from __future__ import annotations

import csv
import io
import os
from decimal import ROUND_HALF_EVEN, Context, Decimal, InvalidOperation
from pathlib import Path

import mpmath

from .angles import Magnitude, RootConfig, _bits_for
from .search import MinRecord

HEADER = ["k", "n", "value", "digits", "a1", "a2", "a3", "a4", "a5", "extra_angles"]


class StoreError(OSError):
    """The store file is unreadable or malformed."""


def mpf_to_decimal(x: mpmath.mpf) -> Decimal:
    """Exact decimal expansion of a binary mpf."""
    # no mpf(x) here: that would round to the ambient precision
    man, exp = x.man_exp if isinstance(x, mpmath.mpf) else mpmath.mpf(x).man_exp
    man, exp = int(man), int(exp)
    if exp >= 0:
        return Decimal(man * 2 ** exp)
    # man / 2^-exp = man * 5^-exp / 10^-exp, exactly
    d = Decimal(man * 5 ** (-exp))
    return d.scaleb(exp, Context(prec=len(d.as_tuple().digits) + 1))


def format_value(x: mpmath.mpf, digits: int) -> str:
    """``x`` with exactly ``digits`` significant digits, round-half-even, E notation."""
    d = Context(prec=digits, rounding=ROUND_HALF_EVEN).plus(mpf_to_decimal(x))
    return f"{d:.{digits - 1}E}"


def parse_value(text: str, digits: int) -> Magnitude:
    try:
        d = Decimal(text)
    except InvalidOperation:
        raise ValueError(f"bad value {text!r}") from None
    if not d.is_finite():
        raise ValueError(f"bad value {text!r}")
    with mpmath.workprec(_bits_for(digits)):
        value = mpmath.mpf(text)
    # half a unit in the last printed place
    err = float(Decimal(5).scaleb(d.adjusted() - digits)) if d else 0.0
    return Magnitude(value, digits, err)


def record_to_row(rec: MinRecord) -> list[str]:
    angles = [str(a) for a in rec.witness.angles]
    head = angles[:5] + [""] * (5 - min(5, len(angles)))
    extra = ";".join(angles[5:])
    return [str(rec.k), str(rec.n), format_value(rec.value.value, rec.value.digits),
            str(rec.value.digits), *head, extra]


def row_to_record(row: list[str]) -> MinRecord:
    if len(row) != len(HEADER):
        raise ValueError(f"expected {len(HEADER)} fields, got {len(row)}")
    k, n, digits = int(row[0]), int(row[1]), int(row[3])
    nums = [int(x) for x in row[4:9] if x != ""]
    if row[9]:
        nums += [int(x) for x in row[9].split(";")]
    if len(nums) != k:
        raise ValueError(f"row has {len(nums)} angles for k={k}")
    value = parse_value(row[2], digits)
    witness = RootConfig(n, tuple(nums))
    return MinRecord(k, n, value, witness, stage2_digits=digits)


def format_row(rec: MinRecord) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(record_to_row(rec))
    return buf.getvalue()


def header_line() -> str:
    return ",".join(HEADER) + "\n"


class ResultsStore:
    """Append-only CSV of MinRecords with an in-memory (k, n) index.

    Each append is a single write of one complete line followed by a flush,
    so concurrent readers never see partial rows.
    """

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self.rows: list[MinRecord] = []
        self.index: dict[tuple[int, int], int] = {}
        if self.path.exists():
            self._load()

    def _load(self):
        try:
            text = self.path.read_text()
        except OSError as exc:
            raise StoreError(f"cannot read {self.path}: {exc}") from exc
        if not text:
            return
        lines = text.splitlines()
        if lines[0] != ",".join(HEADER):
            raise StoreError(f"{self.path}: bad header")
        for lineno, row in enumerate(csv.reader(lines[1:]), 2):
            try:
                rec = row_to_record(row)
            except (ValueError, IndexError) as exc:
                raise StoreError(f"{self.path}:{lineno}: {exc}") from exc
            if rec.key() in self.index:
                self.rows[self.index[rec.key()]] = rec
            else:
                self.index[rec.key()] = len(self.rows)
                self.rows.append(rec)

    def has(self, k: int, n: int) -> bool:
        return (k, n) in self.index

    def get(self, k: int, n: int) -> MinRecord | None:
        i = self.index.get((k, n))
        return None if i is None else self.rows[i]

    def append(self, rec: MinRecord) -> bool:
        """Append unless (k, n) is already stored; returns whether a row was written."""
        if self.has(rec.k, rec.n):
            return False
        new = not self.path.exists() or self.path.stat().st_size == 0
        try:
            with open(self.path, "a", newline="") as fh:
                fh.write((header_line() if new else "") + format_row(rec))
                fh.flush()
        except OSError as exc:
            raise StoreError(f"cannot write {self.path}: {exc}") from exc
        self.index[rec.key()] = len(self.rows)
        self.rows.append(rec)
        return True

    def compact(self):
        """Rewrite the file with one row per (k, n), in first-seen order."""
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        with open(tmp, "w", newline="") as fh:
            fh.write(header_line())
            for rec in self.rows:
                fh.write(format_row(rec))
        os.replace(tmp, self.path)

    def records(self, k: int | None = None) -> list[MinRecord]:
        return [r for r in self.rows if k is None or r.k == k]
