"""Closed forms for f(2,n), f(3,n), f(4,n) with explicit witnesses.

The thresholds ``N_MIN3`` and ``N_MIN4`` were found by comparing against
``exact_min_naive`` for every n up to 500 (see scripts/find_thresholds.py)
and are frozen here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .angles import Magnitude, RootConfig, _bits_for, eval_magnitude, is_vanishing
from .errors import BelowThreshold, InvalidConfig

# least n from which the k=3 formula agrees with the naive oracle (checked to 500)
N_MIN3 = 1
# k=4 agrees for all n >= 2 once the two listed exceptions are special-cased
N_MIN4 = 2


@dataclass(frozen=True)
class ClosedFormResult:
    k: int
    n: int
    value: Magnitude
    witness: RootConfig
    regime: str


def _result(k, n, formula, nums, regime, digits) -> ClosedFormResult:
    witness = RootConfig.of(n, nums)
    with mpmath.workprec(_bits_for(digits)):
        value = +formula()
    # the formula is evaluated at working precision; its error is of the same
    # order as eval_magnitude's, which we take as the certified bound
    err = eval_magnitude(witness, digits).err_bound
    return ClosedFormResult(k, n, Magnitude(value, digits, err), witness, regime)


def _sin_pi_over(m):
    return mpmath.sin(mpmath.pi / m)


def f2_closed(n: int, digits: int = 30) -> ClosedFormResult:
    """f(2, n): two almost opposite roots."""
    if n < 1:
        raise InvalidConfig("n must be >= 1")
    if n == 1:
        return _result(2, 1, lambda: mpmath.mpf(2), (0, 0), "n = 1", digits)
    if n % 2 == 0:
        return _result(2, n, lambda: 2 * _sin_pi_over(n), (0, n // 2 - 1), "n even", digits)
    return _result(2, n, lambda: 2 * _sin_pi_over(2 * n), (0, (n - 1) // 2), "n odd", digits)


def f3_closed(n: int, digits: int = 30) -> ClosedFormResult:
    """f(3, n) for n >= N_MIN3.

    For 3 | n the minimum is ``2 sin(pi/n)``, reached by ``e(1/n) + e(1/3) + e(2/3)``.
    Otherwise it comes from ``1 + 2c(1/3 +- 1/3n)``.
    """
    if n < max(N_MIN3, 1):
        raise BelowThreshold(f"f3_closed holds for n >= {N_MIN3}")
    if n == 3:
        # the 3|n witness {1, 1, 2} is a rotation of 1 + 2e(1/3)
        return _result(3, 3, lambda: mpmath.sqrt(3), (0, 1, 1), "3 | n", digits)
    if n % 3 == 0:
        return _result(3, n, lambda: 2 * _sin_pi_over(n), (1, n // 3, 2 * n // 3), "3 | n",
                       digits)
    x = lambda: 2 * mpmath.pi / (3 * n)  # noqa: E731
    if n % 3 == 2:
        m = (n + 1) // 3
        return _result(3, n, lambda: mpmath.sqrt(3) * mpmath.sin(x()) - 2 * mpmath.sin(x() / 2) ** 2,
                       (0, m, n - m), "n = -1 mod 3", digits)
    m = (n - 1) // 3
    return _result(3, n, lambda: mpmath.sqrt(3) * mpmath.sin(x()) + 2 * mpmath.sin(x() / 2) ** 2,
                   (0, m, n - m), "n = 1 mod 3", digits)


def f4_closed(n: int, digits: int = 30) -> ClosedFormResult:
    """f(4, n): ``|1 + 2e(a/n) + e(2a/n)| = |2 + 2c(a/n)|`` with ``a/n`` near 1/2."""
    if n < 2:
        raise InvalidConfig("f4_closed requires n >= 2")
    if n == 2:
        return _result(4, 2, lambda: mpmath.mpf(2), (0, 0, 0, 1), "small-n exception", digits)
    if n == 4:
        return _result(4, 4, lambda: mpmath.sqrt(2), (0, 0, 1, 2), "small-n exception", digits)
    if n % 2 == 0:
        a = n // 2 - 1
        return _result(4, n, lambda: 4 * _sin_pi_over(n) ** 2, (0, a, a, 2 * a), "n even",
                       digits)
    a = (n - 1) // 2
    return _result(4, n, lambda: 4 * _sin_pi_over(2 * n) ** 2, (0, a, a, 2 * a), "n odd",
                   digits)


def closed_form(k: int, n: int, digits: int = 30) -> ClosedFormResult:
    if k == 2:
        return f2_closed(n, digits)
    if k == 3:
        return f3_closed(n, digits)
    if k == 4:
        return f4_closed(n, digits)
    raise InvalidConfig(f"no closed form for k={k}")


def closed_form_record(k: int, n: int, digits: int = 30):
    """A search MinRecord from the closed form, or None where it does not apply."""
    from .angles import canonicalize
    from .search import MinRecord

    if k == 1:
        witness = RootConfig.of(n, (0,))
        return MinRecord(1, n, eval_magnitude(witness, digits), witness, stage2_digits=digits)
    if k == 3 and n < N_MIN3 or k == 4 and n < N_MIN4 or k not in (2, 3, 4):
        return None
    res = closed_form(k, n, digits)
    witness = canonicalize(res.witness)
    return MinRecord(k, n, eval_magnitude(witness, digits), witness, stage2_digits=digits)


@dataclass(frozen=True)
class LatticePoint:
    """``x*sqrt(3) + i*y`` with rational x, y."""

    sqrt3_coef: Fraction
    imag: Fraction

    @property
    def norm2(self) -> Fraction:
        return 3 * self.sqrt3_coef ** 2 + self.imag ** 2

    def __abs__(self) -> float:
        return float(self.norm2) ** 0.5

    def __complex__(self) -> complex:
        return complex(float(self.sqrt3_coef) * 3 ** 0.5, float(self.imag))


def lattice_t(a: int, b: int, offset: Fraction | int = 0) -> LatticePoint:
    """``t(alpha, beta) = alpha e(1/12) + beta e(-1/12)`` at ``alpha = a + offset``,
    ``beta = b + offset``, in units of 1/n."""
    offset = Fraction(offset)
    if offset not in (0, Fraction(1, 3), Fraction(-1, 3)):
        raise ValueError("offset must be 0 or +-1/3")
    alpha, beta = a + offset, b + offset
    return LatticePoint((alpha + beta) / 2, (alpha - beta) / 2)


def witness_is_valid(res: ClosedFormResult) -> bool:
    return not is_vanishing(res.witness) and eval_magnitude(res.witness, res.value.digits) \
        .close_to(res.value, max(1e-25, 2 * res.value.err_bound))
