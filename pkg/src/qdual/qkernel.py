"""q-shifted factorials and the unified basic hypergeometric summator.

Conventions, with base 0 < q < 1 throughout:

    (a;q)_n   = prod_{j=0}^{n-1} (1 - a q^j),      (a;q)_0 = 1
    (a;q)_inf = prod_{j>=0}     (1 - a q^j)

    r_phi_s(a_1..a_r; b_1..b_s; q, z)
        = sum_k [(a_1..a_r;q)_k / ((b_1..b_s;q)_k (q;q)_k)]
                [(-1)^k q^(k(k-1)/2)]^(1+s-r) z^k

A parameter equal to 0 is legal anywhere: (0;q)_k = 1 identically, so a
vanishing lower parameter is not a pole.  A lower parameter of the form
q^-j with integer j >= 0 *is* a pole once the running index passes j,
unless the series terminates first.

Arithmetic is float64, with one rescue: a terminating sum whose float pass
cancels catastrophically (largest term far above the result) is redone in
exact rational arithmetic.  Float inputs are dyadic rationals, so that
finite sum is formed with no rounding and converted to float once.

Adaptive summation certifies its truncation: it stops only after the
current term has stayed below eps * |partial sum| for three consecutive
terms and a geometric bound on the remaining tail is below the same
threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DivergentSeries,
    InvalidParams,
    PoleInDenominator,
    TermCapExceeded,
)

__all__ = [
    "QContext",
    "Terminating",
    "Adaptive",
    "ADAPTIVE",
    "qpoch",
    "qpoch_multi",
    "qpoch_inf",
    "phi",
    "qexp_E",
]

# |x * q^n - 1| below this means x is treated as the exact lattice value q^-n
LATTICE_MATCH_TOL = 1e-12

# a terminating sum whose largest term exceeds this multiple of the result
# is redone in exact rational arithmetic (float digits are all cancelled)
RESCUE_RATIO = 8.0

# consecutive sub-eps terms required before adaptive truncation may stop
_SMALL_RUN = 3
# consecutive non-decreasing terms (above the eps floor) that trigger the
# divergence diagnosis
_GROW_RUN = 25


@dataclass(frozen=True)
class QContext:
    """Evaluation context shared by every series and product.

    q: base, strictly inside (0, 1).
    eps: relative truncation target for adaptive summation.
    max_terms: hard cap on summation/product length.
    min_subnormal_guard: magnitudes below this are treated as exact zero,
        keeping denormal roundoff out of convergence decisions.
    """

    q: float
    eps: float = 1e-12
    max_terms: int = 10000
    min_subnormal_guard: float = 1e-300

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise InvalidParams(f"base q must lie in (0,1), got {self.q}")
        if not self.eps > 0.0:
            raise InvalidParams("eps must be positive")
        if self.max_terms < 1:
            raise InvalidParams("max_terms must be >= 1")


@dataclass(frozen=True)
class Terminating:
    """Sum exactly n+1 terms; requires a numerator parameter q^-n."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise InvalidParams("termination order must be >= 0")


class Adaptive:
    """Marker: sum until the certified truncation rule fires."""

    __slots__ = ()

    def __repr__(self):  # pragma: no cover - cosmetic
        return "ADAPTIVE"


ADAPTIVE = Adaptive()


def qpoch(a: float, q: float, n: int) -> float:
    """(a;q)_n, finite product. Exact zero factors short-circuit."""
    if n < 0:
        raise InvalidParams("qpoch count must be >= 0")
    a = float(a)
    out = 1.0
    qj = 1.0
    for _ in range(n):
        f = 1.0 - a * qj
        if f == 0.0:
            return 0.0
        out *= f
        qj *= q
    return out


def qpoch_multi(aa, q: float, n: int) -> float:
    """(a_1, ..., a_k; q)_n = prod_i (a_i;q)_n."""
    out = 1.0
    for a in aa:
        out *= qpoch(a, q, n)
        if out == 0.0:
            return 0.0
    return out


def qpoch_inf(a: float, ctx: QContext) -> float:
    """(a;q)_inf with a certified relative tail bound.

    The log of the dropped tail is bounded by sum_{j>J} |a| q^j / (1 - |a| q^j)
    <= 2 |a| q^(J+1) / (1 - q) once |a| q^(J+1) <= 1/2; iteration stops when
    that bound drops below eps/50, keeping truncation near roundoff level.
    """
    a = float(a)
    q, eps = ctx.q, ctx.eps
    out = 1.0
    qj = 1.0
    for _ in range(ctx.max_terms):
        f = 1.0 - a * qj
        if f == 0.0:
            return 0.0
        out *= f
        qj *= q
        aq = abs(a) * qj
        if aq <= 0.5 and 2.0 * aq / (1.0 - q) <= 0.02 * eps:
            return out
    raise TermCapExceeded(
        f"(a;q)_inf with a={a}, q={q} not certified within {ctx.max_terms} factors"
    )


def _pole_index(b: float, q: float, tol: float, search_cap: int) -> int | None:
    """Smallest j >= 0 with |b q^j - 1| <= tol, else None.

    Only indices with |b| q^j >= 1/2 can match, so the scan is short.
    """
    if b == 0.0:
        return None
    bq = b
    for j in range(search_cap):
        if abs(bq) < 0.5:
            return None
        if abs(bq - 1.0) <= tol:
            return j
        bq *= q
    return None


def _phi_exact(numer, denom, q: float, z: float, n: int, power: int) -> float:
    """Terminating sum re-evaluated in exact rational arithmetic.

    Every float input is a dyadic rational, so the finite sum can be formed
    with no rounding at all and converted to float exactly once.  This is
    the rescue path for alternating terminating series whose value sits many
    orders of magnitude below the largest term.
    """
    qf = Fraction(q)
    zf = Fraction(z)
    nu = [Fraction(a) for a in numer]
    de = [Fraction(b) for b in denom]
    s = Fraction(1)
    t = Fraction(1)
    qk1 = Fraction(1)
    for k in range(1, n + 1):
        factor = zf / (1 - qk1 * qf)
        for a in nu:
            factor *= 1 - a * qk1
        for b in de:
            factor /= 1 - b * qk1
        if power:
            factor *= (-qk1) ** power
        t *= factor
        if t == 0:
            break
        s += t
        qk1 *= qf
    return float(s)


def phi(numer, denom, q: float, z: float, term, ctx: QContext) -> float:
    """Unified r_phi_s summator (see module docstring for the convention).

    term is either Terminating(n) (requires a numerator parameter equal to
    q^-n within 1e-12, sums k = 0..n) or ADAPTIVE (certified truncation).
    """
    numer = tuple(float(a) for a in numer)
    denom = tuple(float(b) for b in denom)
    z = float(z)
    power = 1 + len(denom) - len(numer)

    if isinstance(term, Terminating):
        n = term.n
        if not any(abs(a * q**n - 1.0) <= LATTICE_MATCH_TOL for a in numer):
            raise InvalidParams(
                f"Terminating({n}) requires a numerator parameter q^-{n} "
                f"within {LATTICE_MATCH_TOL}"
            )
        limit = n
    elif isinstance(term, Adaptive):
        limit = None
    else:
        raise InvalidParams(f"unknown termination mode {term!r}")

    # A lower parameter q^-j zeroes a denominator factor at index k = j+1;
    # fatal unless the series stops at k <= j.
    for b in denom:
        j = _pole_index(b, q, LATTICE_MATCH_TOL, ctx.max_terms)
        if j is not None and (limit is None or j < limit):
            raise PoleInDenominator(
                f"denominator parameter {b} = q^-{j} vanishes at term {j + 1}"
            )

    if z == 0.0:
        return 1.0

    if limit is not None:
        s = 1.0  # k = 0 term
        t = 1.0
        mx = 1.0
        qk1 = 1.0  # q^(k-1) inside the loop
        for k in range(1, limit + 1):
            factor = z / (1.0 - qk1 * q)
            for a in numer:
                factor *= 1.0 - a * qk1
            for b in denom:
                factor /= 1.0 - b * qk1
            if power:
                factor *= (-qk1) ** power
            t *= factor
            if abs(t) <= ctx.min_subnormal_guard:
                t = 0.0
            s += t
            qk1 *= q
            if t == 0.0:
                break  # an exact zero factor ends a terminating sum early
            mx = max(mx, abs(t))
        if mx > RESCUE_RATIO * max(abs(s), ctx.min_subnormal_guard):
            # heavy cancellation: the sum is far below its largest term, so
            # the float pass carries no certified digits.  Float inputs are
            # dyadic rationals; redo the finite sum without rounding.
            return _phi_exact(numer, denom, q, z, limit, power)
        return s

    s = 1.0  # k = 0 term
    t = 1.0
    qk1 = 1.0  # q^(k-1) inside the loop
    small_run = 0
    grow_run = 0
    prev_abs = 1.0
    k = 0
    while True:
        k += 1
        if k > ctx.max_terms:
            if grow_run > 0:
                raise DivergentSeries(
                    f"terms still growing after {ctx.max_terms} terms (|t|={abs(t):.3e})"
                )
            raise TermCapExceeded(
                f"adaptive sum not certified within {ctx.max_terms} terms"
            )
        factor = z / (1.0 - qk1 * q)
        for a in numer:
            factor *= 1.0 - a * qk1
        for b in denom:
            factor /= 1.0 - b * qk1
        if power:
            factor *= (-qk1) ** power
        t *= factor
        if abs(t) <= ctx.min_subnormal_guard:
            t = 0.0
        s += t
        qk1 *= q
        if limit is not None:
            if t == 0.0:
                return s  # an exact zero factor ends a terminating sum early
            continue

        # adaptive certification
        ta = abs(t)
        if t == 0.0:
            return s
        floor = ctx.eps * max(abs(s), ctx.min_subnormal_guard)
        ratio = ta / prev_abs if prev_abs > 0.0 else math.inf
        if ta <= floor:
            small_run += 1
            grow_run = 0
            if small_run >= _SMALL_RUN and ratio < 1.0:
                tail = ta * ratio / (1.0 - ratio)
                if tail <= floor:
                    return s
        else:
            small_run = 0
            if ratio >= 1.0:
                grow_run += 1
                if grow_run >= _GROW_RUN:
                    raise DivergentSeries(
                        f"{grow_run} consecutive non-decreasing terms at k={k}"
                    )
            else:
                grow_run = 0
        prev_abs = ta


def qexp_E(z: float, ctx: QContext) -> float:
    """Jackson's q-exponential E_q(z) = (-z;q)_inf (entire in z)."""
    return qpoch_inf(-float(z), ctx)
