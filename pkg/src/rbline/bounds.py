"""Lower-bound machinery: recurrence table, closed form, grid verifiers.

``t_hat(p, q, r)`` is the least integer function satisfying

    t_hat(p, 1, r) = 1
    t_hat(p, q, r) = max(2**q - 1,
                         min(2**q + 2 * t_hat(p + r, q - 1, 0),
                             t_hat(p - 1, q - 1, 0) + t_hat(p - 1, q - 1, r + 1)))

where the second min-branch exists only for p >= 1.  It lower-bounds the
cost of clearing a rank-q block when the buffer has room for p new
requests and already holds r old ones.

``tau(p, q, r)`` is the closed form (2**q / a) * (q - (1+eta)*p - b_r)
with a = (1+eta) * log2(1 + 1/eta) and b_r = 2 * (2**r - 1) * eta.  The
rational parts are kept exact; the log2 factor is evaluated at 120-bit
precision (mpmath), except when 1 + 1/eta is a power of two, where a is an
exact rational and tau returns exact Fractions.  Inequality checks
therefore need only the caller-supplied tolerance, and margins are
trustworthy well below 1e-9.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import mpmath

_PREC_BITS = 120

Real = Union[Fraction, mpmath.mpf]


@dataclass(frozen=True)
class TauParams:
    """Constants of the closed-form bound for one eta in (0, 1)."""

    eta: Fraction
    a: Real
    exact: bool

    @staticmethod
    def from_eta(eta) -> "TauParams":
        eta = Fraction(eta)
        if not (0 < eta < 1):
            raise ValueError(f"eta must be in (0, 1), got {eta}")
        x = 1 + 1 / eta
        num = x.numerator
        if x.denominator == 1 and num & (num - 1) == 0:
            # log2 of an exact power of two: a is rational
            a = (1 + eta) * (num.bit_length() - 1)
            return TauParams(eta=eta, a=a, exact=True)
        with mpmath.workprec(_PREC_BITS):
            log2_x = mpmath.log(mpmath.mpf(x.numerator) / x.denominator) / mpmath.log(2)
            a = (mpmath.mpf((1 + eta).numerator) / (1 + eta).denominator) * log2_x
        return TauParams(eta=eta, a=a, exact=False)

    def b(self, i: int) -> Fraction:
        if i < 0:
            raise ValueError(f"b index must be >= 0, got {i}")
        return 2 * (2 ** i - 1) * self.eta


def tau(p, q: int, r: int, params: TauParams) -> Real:
    """Closed-form bound value; may be negative (then it is vacuous).

    ``p`` may be any rational-compatible number (ints, Fractions, floats);
    it is coerced exactly.
    """
    if q < 1 or r < 0:
        raise ValueError(f"need q >= 1 and r >= 0, got q={q}, r={r}")
    inner = Fraction(q) - (1 + params.eta) * Fraction(p) - params.b(r)
    scale = Fraction(2 ** q)
    if params.exact:
        return scale * inner / params.a
    with mpmath.workprec(_PREC_BITS):
        num = scale * inner
        return (mpmath.mpf(num.numerator) / num.denominator) / params.a


def f_bound(r: int, params: TauParams) -> Fraction:
    """f(r) = (1 + eta) * r - b_r + 1; stays at or below a for all r >= 0."""
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    return (1 + params.eta) * r - params.b(r) + 1


def separation_bound(ell: int, eps) -> Real:
    """Per-phase cost ratio floor: ell * eps**2 / ((1+eps) * log2(1+1/eps)).

    Satisfies 2**ell * separation_bound(ell, eps) == tau((1-eps)*ell, ell, 0)
    with eta = eps.
    """
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    eps = Fraction(eps)
    params = TauParams.from_eta(eps)
    num = Fraction(ell) * eps * eps
    if params.exact:
        return num / params.a
    with mpmath.workprec(_PREC_BITS):
        return (mpmath.mpf(num.numerator) / num.denominator) / params.a


class BoundTable:
    """Memoized t_hat values; entries are immutable once computed."""

    def __init__(self):
        self._memo: dict[tuple[int, int, int], int] = {}

    def __len__(self) -> int:
        return len(self._memo)

    def value(self, p: int, q: int, r: int) -> int:
        if p < 0 or q < 1 or r < 0:
            raise ValueError(f"need p >= 0, q >= 1, r >= 0, got ({p}, {q}, {r})")
        memo = self._memo
        got = memo.get((p, q, r))
        if got is not None:
            return got
        if q == 1:
            memo[(p, q, r)] = 1
            return 1
        branch = 2 ** q + 2 * self.value(p + r, q - 1, 0)
        if p >= 1:
            other = self.value(p - 1, q - 1, 0) + self.value(p - 1, q - 1, r + 1)
            if other < branch:
                branch = other
        result = max(2 ** q - 1, branch)
        memo[(p, q, r)] = result
        return result


_SHARED_TABLE = BoundTable()


def t_hat(p: int, q: int, r: int, table: Optional[BoundTable] = None) -> int:
    """Least solution of the recurrence; see module docstring."""
    return (table or _SHARED_TABLE).value(p, q, r)


# ---------------------------------------------------------------------------
# grid verifiers

@dataclass(frozen=True)
class GridFailure:
    eta: Fraction
    p: int
    q: int
    r: int
    family: str
    lhs: float
    rhs: float
    margin: float


@dataclass(frozen=True)
class GridReport:
    check: str
    points_checked: int
    tolerance: float
    min_margin: Optional[float]
    failures: tuple[GridFailure, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.failures

    def rows(self) -> list[dict]:
        return [
            {
                "check": self.check,
                "family": f.family,
                "eta": str(f.eta),
                "p": f.p,
                "q": f.q,
                "r": f.r,
                "lhs": f"{f.lhs:.12g}",
                "rhs": f"{f.rhs:.12g}",
                "margin": f"{f.margin:.12g}",
            }
            for f in self.failures
        ]


def _as_float(x: Real) -> float:
    return float(x)


def verify_tau_dominated(
    p_max: int,
    q_max: int,
    r_max: int,
    eta_grid,
    tolerance: float = 1e-9,
    tau_factor=1,
    table: Optional[BoundTable] = None,
) -> GridReport:
    """Check t_hat(p,q,r) >= tau_factor * tau(p,q,r) - tolerance over a grid.

    ``tau_factor`` is a mutation hook for testing the verifier itself; the
    real claim uses the default factor 1.
    """
    table = table or _SHARED_TABLE
    tau_factor = Fraction(tau_factor)
    failures: list[GridFailure] = []
    points = 0
    min_margin: Optional[float] = None
    with mpmath.workprec(_PREC_BITS):
        for eta in eta_grid:
            params = TauParams.from_eta(eta)
            for q in range(1, q_max + 1):
                for p in range(p_max + 1):
                    for r in range(r_max + 1):
                        points += 1
                        lhs = table.value(p, q, r)
                        rhs = tau(p, q, r, params)
                        if tau_factor != 1:
                            rhs = rhs * tau_factor if isinstance(rhs, Fraction) else rhs * float(tau_factor)
                        margin = _as_float(lhs - rhs)
                        if min_margin is None or margin < min_margin:
                            min_margin = margin
                        if margin < -tolerance:
                            failures.append(
                                GridFailure(params.eta, p, q, r, "dominates", float(lhs), _as_float(rhs), margin)
                            )
    return GridReport("tau-dominated", points, tolerance, min_margin, tuple(failures))


def verify_induction_steps(
    p_max: int,
    q_max: int,
    r_max: int,
    eta_grid,
    tolerance: float = 1e-9,
) -> GridReport:
    """Check the two step families behind the closed form, for q >= 2:

    (i)  2**q + 2*tau(p+r, q-1, 0) >= tau(p, q, r)          for p >= 0
    (ii) tau(p-1, q-1, 0) + tau(p-1, q-1, r+1) == tau(p,q,r) for p >= 1

    Family (ii) is an exact identity; with an exact-rational eta (such as
    1/3) it passes at tolerance 0.
    """
    failures: list[GridFailure] = []
    points = 0
    min_margin: Optional[float] = None

    def note(margin: float, eta, p, q, r, family, lhs, rhs):
        nonlocal min_margin
        if min_margin is None or margin < min_margin:
            min_margin = margin
        if margin < -tolerance:
            failures.append(GridFailure(eta, p, q, r, family, _as_float(lhs), _as_float(rhs), margin))

    with mpmath.workprec(_PREC_BITS):
        for eta in eta_grid:
            params = TauParams.from_eta(eta)
            for q in range(2, q_max + 1):
                for p in range(p_max + 1):
                    for r in range(r_max + 1):
                        points += 1
                        target = tau(p, q, r, params)
                        lhs1 = 2 ** q + 2 * tau(p + r, q - 1, 0, params)
                        note(_as_float(lhs1 - target), params.eta, p, q, r, "half-traversal", lhs1, target)
                        if p >= 1:
                            lhs2 = tau(p - 1, q - 1, 0, params) + tau(p - 1, q - 1, r + 1, params)
                            # equality family: both directions must hold
                            note(_as_float(lhs2 - target), params.eta, p, q, r, "split-equality", lhs2, target)
                            note(_as_float(target - lhs2), params.eta, p, q, r, "split-equality", target, lhs2)
    return GridReport("induction-steps", points, tolerance, min_margin, tuple(failures))
