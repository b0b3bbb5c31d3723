"""Second-order expansions of extreme quantiles F^{-1}(1-u) as u -> 0.

Each Burr member gets a two-term expansion ``leading + correction`` together
with the order of the neglected remainder.  Members with a finite upper
endpoint (I, IV, V, XI) are expanded in the gap ``uep - F^{-1}(1-u)``.

Two forms are available.  ``form="corrected"`` (the default) uses expansions
re-derived from the exact inverses; ``form="printed"`` reproduces the
published formulas verbatim, which for a few members carry a wrong
coefficient or drop a log r term.  Exact quantities are evaluated in mpmath so
that remainders far below double precision can be measured and fitted.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import mpmath as mp
import numpy as np

from .distributions import MemberId, Params
from .exceptions import DomainError, UnsupportedMemberError

__all__ = [
    "Frame",
    "RemainderKind",
    "RemainderOrder",
    "ExpansionResult",
    "RemainderFit",
    "XiConstants",
    "DEFAULT_U0",
    "expand_quantile",
    "exact_quantity",
    "remainder",
    "fit_remainder_order",
    "remainder_order",
    "xi_constants",
]

DEFAULT_U0 = 0.1
_DPS = 60
FORMS = ("corrected", "printed")


class Frame(str, enum.Enum):
    DIRECT = "direct"
    GAP = "upper-endpoint-gap"


class RemainderKind(str, enum.Enum):
    POWER_OF_U = "power-of-u"
    POWER_OF_LOG_RECIPROCAL = "power-of-log-reciprocal"
    POWER_OF_LOGLOG_RECIPROCAL = "power-of-loglog-reciprocal"
    POWER_OF_U_OVER_LOG = "power-of-u-over-log"


class RemainderOrder(NamedTuple):
    kind: RemainderKind | None  # None: the expansion is exact
    exponent: float
    relative: bool  # remainder is measured relative to the leading term


@dataclass(frozen=True)
class ExpansionResult:
    member: MemberId
    u: float
    frame: Frame
    leading: float
    correction: float
    value: float
    remainder_spec: RemainderOrder
    form: str = "corrected"


class RemainderFit(NamedTuple):
    exponent: float | None  # fitted slope, None when the expansion is exact
    exact: bool
    stated: RemainderOrder


class XiConstants(NamedTuple):
    """Burr XI tail constants: 1 - F(1 - X) = alpha X^3 + beta X^5 + ..."""

    alpha_fit: float
    beta_fit: float
    alpha_printed: float
    beta_printed: float
    alpha_derived: float
    beta_derived: float


_GAP_MEMBERS = (MemberId.I, MemberId.IV, MemberId.V, MemberId.XI)


def _frame(member: MemberId) -> Frame:
    return Frame.GAP if member in _GAP_MEMBERS else Frame.DIRECT


def remainder_order(member, params: Params, form: str = "corrected") -> RemainderOrder:
    """Order of the remainder left by the two-term expansion."""
    member = _burr_member(member)
    P = RemainderKind.POWER_OF_U
    if member is MemberId.I:
        return RemainderOrder(None, math.inf, False)
    if member in (MemberId.II, MemberId.VII, MemberId.VIII):
        return RemainderOrder(P, 2.0, False)
    if member is MemberId.III:
        return RemainderOrder(P, 2.0, True)
    if member is MemberId.IV:
        # the neglected w^c term of c w^c / (1 + w^c) is O(u^c) relative
        exponent = 2.0 if form == "printed" else min(2.0, params.c)
        return RemainderOrder(P, exponent, True)
    if member is MemberId.V:
        return RemainderOrder(RemainderKind.POWER_OF_LOG_RECIPROCAL, 5.0, False)
    if member is MemberId.VI:
        if form == "printed":
            return RemainderOrder(RemainderKind.POWER_OF_LOGLOG_RECIPROCAL, 3.0, False)
        return RemainderOrder(RemainderKind.POWER_OF_LOG_RECIPROCAL, 4.0, False)
    if member is MemberId.IX:
        return RemainderOrder(P, min(2.0, 1.0 / params.r), False)
    if member in (MemberId.X, MemberId.Xa):
        return RemainderOrder(RemainderKind.POWER_OF_U_OVER_LOG, 2.0, True)
    if member is MemberId.XI:
        return RemainderOrder(P, 4.0 / 9.0, True)
    if member is MemberId.XII:
        return RemainderOrder(P, 3.0 / params.r, True)
    raise UnsupportedMemberError(f"no expansion for {member.value}")  # pragma: no cover


def _burr_member(member) -> MemberId:
    member = MemberId.parse(member)
    if member in (MemberId.SinghMaddala, MemberId.Dagum, MemberId.ToppLeoneDagum):
        raise UnsupportedMemberError(f"no quantile expansion is defined for {member.value}")
    return member


# ---------------------------------------------------------------------------
# exact quantities in mpmath

def _w(u, r):
    """(1-u)^{-1/r} - 1."""
    return mp.expm1(-mp.log1p(-u) / r)


def _m(u, r):
    """1 - (1-u)^{1/r}."""
    return -mp.expm1(mp.log1p(-u) / r)


def _h(X):
    """X - sin(2 pi X)/(2 pi)."""
    return X - mp.sin(2 * mp.pi * X) / (2 * mp.pi)


def _exact_mp(member: MemberId, params: Params, u):
    k, c, r = mp.mpf(params.k), mp.mpf(params.c), mp.mpf(params.r)
    if member is MemberId.I:
        return u
    if member is MemberId.II:
        return -mp.log(_w(u, r))
    if member is MemberId.III:
        return _w(u, r) ** (-1 / k)
    if member is MemberId.IV:
        wc = _w(u, r) ** c
        return c * wc / (1 + wc)
    if member is MemberId.V:
        t = mp.log(k) - mp.log(_w(u, r))
        return mp.atan(1 / t) if t > 0 else mp.pi / 2 - mp.atan(t)
    if member is MemberId.VI:
        return mp.asinh(mp.log(k) - mp.log(_w(u, r)))
    if member is MemberId.VII:
        return -mp.log(_w(u, r)) / 2
    if member is MemberId.VIII:
        return -mp.log(mp.tan(mp.pi * _m(u, r) / 2))
    if member is MemberId.IX:
        A = (2 - (2 - k) * u) / (k * u)
        return mp.log(A ** (1 / r) - 1)
    if member is MemberId.X:
        return mp.sqrt(-mp.log(_w(u, r)))
    if member is MemberId.XI:
        target = _m(u, r)
        x0 = (6 * target / (2 * mp.pi) ** 2) ** (mp.mpf(1) / 3)
        return mp.findroot(lambda X: _h(X) - target, x0)
    if member is MemberId.XII:
        return mp.expm1(-mp.log(u) / r) ** (1 / c)
    if member is MemberId.Xa:
        return mp.sqrt(-mp.log(_m(u, r)))
    raise UnsupportedMemberError(f"no expansion for {member.value}")  # pragma: no cover


def exact_quantity(member, params: Params, u: float) -> float:
    """F^{-1}(1-u), or uep - F^{-1}(1-u) for gap-frame members."""
    member = _burr_member(member)
    with mp.workdps(_DPS):
        return float(_exact_mp(member, params, mp.mpf(u)))


# ---------------------------------------------------------------------------
# Burr XI constants

@functools.lru_cache(maxsize=64)
def xi_constants(r: float) -> XiConstants:
    """Fit alpha, beta from 1 - F(1 - X) over X in [1e-3, 1e-2].

    The survival is evaluated in high precision and (1 - F(1-X))/X^3 is fitted
    by a degree-5 polynomial in X; its constant term is alpha and its X^2
    coefficient is beta.  The published constants and the ones implied by a
    binomial expansion of (1 - h(X))^r are returned alongside for comparison.
    """
    with mp.workdps(_DPS):
        rr = mp.mpf(r)
        xs = [mp.mpf(10) ** (-3 + mp.mpf(j) / 15) for j in range(16)]
        ys = [(1 - (1 - _h(X)) ** rr) / X ** 3 for X in xs]
        A = mp.matrix([[X ** j for j in range(6)] for X in xs])
        coef, _ = mp.qr_solve(A, mp.matrix(ys))
        two_pi = 2 * mp.pi
        return XiConstants(
            alpha_fit=float(coef[0]),
            beta_fit=float(coef[2]),
            alpha_printed=float(two_pi ** 2 / (6 * rr)),
            beta_printed=float(-two_pi ** 4 / (120 * rr)),
            alpha_derived=float(rr * two_pi ** 2 / 6),
            beta_derived=float(-rr * two_pi ** 4 / 120),
        )


# ---------------------------------------------------------------------------
# expansions

def _check_u(member: MemberId, params: Params, u: float, u0: float, form: str):
    if form not in FORMS:
        raise DomainError(f"form must be one of {FORMS}, got {form!r}")
    if not (isinstance(u, (int, float)) and math.isfinite(u)) or not 0.0 < u < u0:
        raise DomainError(f"u must lie in (0, {u0}), got {u!r}")
    if member is MemberId.VI:
        if u >= 1.0 / math.e:
            raise DomainError("the Burr VI expansion requires u < 1/e")
        if math.log(params.k * params.r / u) <= 1.0:
            raise DomainError("the Burr VI expansion requires log(kr/u) > 1")
        if form == "printed" and params.k * params.r <= 1.0:
            raise DomainError("the printed Burr VI expansion needs kr > 1 (log log kr)")
    if member is MemberId.V and math.log(params.k * params.r / u) <= 0.0:
        raise DomainError("the Burr V expansion requires kr/u > 1")


def _terms_mp(member: MemberId, params: Params, u, form: str):
    """(leading, correction) in mpmath for the requested form."""
    k, c, r = mp.mpf(params.k), mp.mpf(params.c), mp.mpf(params.r)
    printed = form == "printed"
    if member is MemberId.I:
        return u, mp.mpf(0)
    if member is MemberId.II:
        return mp.log(r) - mp.log(u), -(r + 1) / (2 * r) * u
    if member is MemberId.III:
        lead = r ** (1 / k) * u ** (-1 / k)
        return lead, -lead * (r + 1) / (2 * k * r) * u
    if member is MemberId.IV:
        lead = c * r ** (-c) * u ** c
        return lead, lead * c * (r + 1) / (2 * r) * u
    if member is MemberId.V:
        L = mp.log(k * r / u)
        return 1 / L, -(mp.mpf(1) / 2 if printed else mp.mpf(1) / 3) * L ** -3
    if member is MemberId.VI:
        L = mp.log(k * r / u)
        if printed:
            lead = mp.log(2) + mp.log(mp.log(k * r)) + mp.log(mp.log(1 / u))
            return lead, mp.log(L) ** -2 / 4
        return mp.log(2) + mp.log(L), L ** -2 / 4
    if member is MemberId.VII:
        return mp.log(r) / 2 - mp.log(u) / 2, -(1 + r) / (4 * r) * u
    if member is MemberId.VIII:
        sign = -1 if printed else 1
        return mp.log(2 * r / mp.pi) - mp.log(u), sign * (1 - r) / (2 * r) * u
    if member is MemberId.IX:
        return mp.log(2 / (u * k)) / r, -(2 - k) / (2 * r) * u
    if member in (MemberId.X, MemberId.Xa):
        L = -mp.log(u) if printed else mp.log(r / u)
        lead = mp.sqrt(L)
        coef = -(r + 1) / (4 * r) if member is MemberId.X else (1 - r) / (4 * r)
        return lead, lead * coef * u / L
    if member is MemberId.XI:
        consts = xi_constants(float(params.r))
        if printed:
            alpha, beta = mp.mpf(consts.alpha_printed), mp.mpf(consts.beta_printed)
            lead = alpha ** (-mp.mpf(1) / 3) * u ** (mp.mpf(1) / 3)
            return lead, -lead * beta / (3 * alpha) * alpha ** (-mp.mpf(1) / 3) * u ** (mp.mpf(2) / 3)
        alpha, beta = mp.mpf(consts.alpha_fit), mp.mpf(consts.beta_fit)
        lead = (u / alpha) ** (mp.mpf(1) / 3)
        return lead, -lead * beta / (3 * alpha) * (u / alpha) ** (mp.mpf(2) / 3)
    if member is MemberId.XII:
        lead = u ** (-1 / (r * c))
        v = u ** (1 / r)
        return lead, lead * (-v / c + (1 - c) / (2 * c ** 2) * v ** 2)
    raise UnsupportedMemberError(f"no expansion for {member.value}")  # pragma: no cover


def expand_quantile(member, params: Params, u: float, *, u0: float = DEFAULT_U0,
                    form: str = "corrected") -> ExpansionResult:
    """Two-term expansion of F^{-1}(1-u), or of the endpoint gap for I, IV, V, XI."""
    member = _burr_member(member)
    u = float(u)
    _check_u(member, params, u, u0, form)
    with mp.workdps(_DPS):
        lead, corr = _terms_mp(member, params, mp.mpf(u), form)
        leading, correction = float(lead), float(corr)
    return ExpansionResult(
        member=member,
        u=u,
        frame=_frame(member),
        leading=leading,
        correction=correction,
        value=leading + correction,
        remainder_spec=remainder_order(member, params, form),
        form=form,
    )


def _remainder_mp(member: MemberId, params: Params, u: float, form: str):
    lead, corr = _terms_mp(member, params, mp.mpf(u), form)
    return _exact_mp(member, params, mp.mpf(u)) - (lead + corr), lead


def remainder(member, params: Params, u: float, *, u0: float = DEFAULT_U0,
              form: str = "corrected") -> float:
    """Exact quantity minus the two-term expansion, in the expansion's frame."""
    member = _burr_member(member)
    u = float(u)
    _check_u(member, params, u, u0, form)
    with mp.workdps(_DPS):
        rem, _ = _remainder_mp(member, params, u, form)
        return float(rem)


def fit_remainder_order(member, params: Params, u_grid: Sequence[float], *,
                        u0: float = DEFAULT_U0, form: str = "corrected") -> RemainderFit:
    """Least-squares slope of log|remainder| against the log of the scale variable.

    The scale variable is u for power-of-u kinds, 1/log(1/u) or
    1/log(log(1/u)) for the logarithmic kinds; for power-of-u-over-log the
    remainder is first multiplied by log(1/u).  Relative kinds divide the
    remainder by the leading term first.
    """
    member = _burr_member(member)
    grid = [float(u) for u in u_grid]
    if len(grid) < 5:
        raise DomainError("fit needs at least 5 grid points")
    for u in grid:
        _check_u(member, params, u, u0, form)
    stated = remainder_order(member, params, form)
    xs, ys, exact = [], [], True
    with mp.workdps(_DPS):
        for u in grid:
            rem, lead = _remainder_mp(member, params, u, form)
            mu = mp.mpf(u)
            size = abs(rem / lead) if stated.relative else abs(rem)
            # anything this close to zero at 60 digits is an identity, not a rate
            if size > mp.mpf(10) ** (-_DPS + 15) * max(1, abs(lead)):
                exact = False
            kind = stated.kind or RemainderKind.POWER_OF_U
            if kind is RemainderKind.POWER_OF_U:
                x = mp.log(mu)
            elif kind is RemainderKind.POWER_OF_LOG_RECIPROCAL:
                x = -mp.log(-mp.log(mu))
            elif kind is RemainderKind.POWER_OF_LOGLOG_RECIPROCAL:
                x = -mp.log(mp.log(-mp.log(mu)))
            else:
                x = mp.log(mu)
                size = size * -mp.log(mu)
            xs.append(float(x))
            ys.append(float(mp.log(size)) if size > 0 else -math.inf)
    if exact:
        return RemainderFit(None, True, stated)
    slope = float(np.polyfit(np.array(xs), np.array(ys), 1)[0])
    return RemainderFit(slope, False, stated)
