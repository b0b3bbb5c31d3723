"""Extreme-value classification and auxiliary functions for the Burr family.

The domain of attraction of each member is stored data (``classify``); the
numeric probes in ``probe_gamma`` check it from the exact quantiles.  The
auxiliary functions follow the representations with a = 0:

* gamma > 0:  b(u) = -u d/du log Q(u) - gamma, with Q(u) = F^{-1}(1-u)
  (for members classified through exp(X), Q is replaced by exp(Q));
* gamma < 0:  b(u) = -gamma - u / (f(Q(u)) (uep - Q(u)));
* gamma = 0:  s(u) = -u d/du Q(u), in closed form for Burr V, VI, X and Xa.
"""
from __future__ import annotations

import enum
import math
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate

from .distributions import MemberId, Params, sf, support, tail_quantile
from .exceptions import DivergenceError, DomainError, UnsupportedMemberError

__all__ = [
    "Transform",
    "DomainClass",
    "AuxFunctions",
    "ProbeResult",
    "GUMBEL_MEMBERS",
    "classify",
    "gev_cdf",
    "probe_gamma",
    "aux_s",
    "aux_s_numeric",
    "aux_b",
    "aux_functions",
    "mean_excess",
    "hb_limit",
]

GUMBEL_MEMBERS = (MemberId.V, MemberId.VI, MemberId.X, MemberId.Xa)
PROBE_MU = 4.0
FD_STEP = 1e-4  # central-difference step, relative to u
# below this log u, (1-u)^{-1/r} - 1 and (1-u)^{+-(r+1)/r} are u/r and 1 to double precision
_DEEP_TAIL = -700.0


class Transform(str, enum.Enum):
    NONE = "none"
    LOG = "log"  # the index describes exp(X); X itself is Gumbel-attracted


class DomainClass(NamedTuple):
    gamma: float
    uep: float
    transform: Transform


class AuxFunctions(NamedTuple):
    s: Callable[[float], float] | None
    b: Callable[[float], float] | None
    alpha_hb: float | None  # limit of sqrt(n) s(e^-n) when defined


class ProbeResult(NamedTuple):
    """Per-u estimates.  For gamma != 0 they estimate gamma; for Gumbel members
    they are the double ratio, whose target is log(lambda)/log(mu)."""

    u: np.ndarray
    estimates: np.ndarray
    target: float
    kind: str  # "index", "endpoint", "log-index" or "double-ratio"


def classify(member, params: Params) -> DomainClass:
    """Extreme value index, upper endpoint and transform flag (tabulated)."""
    m = MemberId.parse(member)
    k, c, r, b, d = params.k, params.c, params.r, params.b, params.d
    inf, none, log = math.inf, Transform.NONE, Transform.LOG
    table = {
        MemberId.I: (-1.0, 1.0, none),
        MemberId.II: (1.0, inf, log),
        MemberId.III: (1.0 / k, inf, none),
        MemberId.IV: (-c, c, none),
        MemberId.V: (0.0, math.pi / 2, none),
        MemberId.VI: (0.0, inf, none),
        MemberId.VII: (0.5, inf, log),
        MemberId.VIII: (1.0, inf, log),
        MemberId.IX: (1.0 / r, inf, log),
        MemberId.X: (0.0, inf, none),
        MemberId.XI: (-1.0 / 3.0, 1.0, none),
        MemberId.XII: (1.0 / (r * c), inf, none),
        MemberId.Xa: (0.0, inf, none),
        MemberId.SinghMaddala: (1.0 / (r * c), inf, none),
        MemberId.Dagum: (1.0 / b, inf, none),
        MemberId.ToppLeoneDagum: (1.0 / (b * d), inf, none),
    }
    return DomainClass(*table[m])


def gev_cdf(gamma: float, x):
    """H_gamma(x) = exp(-(1 + gamma x)^{-1/gamma}); H_0(x) = exp(-e^{-x})."""
    x = np.asarray(x, dtype=float)
    gamma = float(gamma)
    with np.errstate(all="ignore"):
        if gamma == 0.0:
            out = np.exp(-np.exp(-x))
        else:
            z = gamma * x
            inside = z > -1.0
            t = np.exp(-np.log1p(np.where(inside, z, 0.0)) / gamma)
            out = np.where(inside, np.exp(-t), 0.0 if gamma > 0 else 1.0)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# probes

def _log_u_array(u_grid) -> np.ndarray:
    u = np.atleast_1d(np.asarray(u_grid, dtype=float))
    if np.any(~(u > 0.0)) or np.any(u >= 1.0):
        raise DomainError("u values must lie in (0, 1)")
    return np.log(u)


def probe_gamma(member, params: Params, lam: float, u_grid, mu: float = PROBE_MU) -> ProbeResult:
    """Numeric limit probes of the extreme value index at each u.

    Heavy tails: -log(Q(lam u)/Q(u))/log lam.  Finite endpoint: the same on
    the gaps uep - Q.  Members classified through exp(X): -(Q(lam u) - Q(u))/log lam.
    Gumbel members: (Q(lam u) - Q(u))/(Q(mu u) - Q(u)), to be compared with
    log(lam)/log(mu).
    """
    m = MemberId.parse(member)
    lam, mu = float(lam), float(mu)
    if lam <= 0 or lam == 1.0:
        raise DomainError("lambda must be positive and different from 1")
    cls = classify(m, params)
    log_u = _log_u_array(u_grid)
    if np.any(log_u + max(math.log(lam), math.log(mu), 0.0) >= 0.0):
        raise DomainError("lambda * u and mu * u must stay below 1")
    u = np.exp(log_u)

    def tq(shift):
        return tail_quantile(m, params, log_u + shift)

    if cls.gamma == 0.0 and cls.transform is Transform.NONE:
        if mu <= 0 or mu == 1.0 or mu == lam:
            raise DomainError("mu must be positive, different from 1 and from lambda")
        if math.isfinite(cls.uep):
            # differences of gaps, which keep their precision near the endpoint
            g0, gl, gm = (np.exp(tq(s).log_gap) for s in (0.0, math.log(lam), math.log(mu)))
            est = (g0 - gl) / (g0 - gm)
        else:
            q0, ql, qm = (tq(s).value for s in (0.0, math.log(lam), math.log(mu)))
            est = (ql - q0) / (qm - q0)
        return ProbeResult(u, np.atleast_1d(est), math.log(lam) / math.log(mu), "double-ratio")
    if cls.transform is Transform.LOG:
        est = -(tq(math.log(lam)).value - tq(0.0).value) / math.log(lam)
        kind = "log-index"
    elif cls.gamma < 0:
        est = -(tq(math.log(lam)).log_gap - tq(0.0).log_gap) / math.log(lam)
        kind = "endpoint"
    else:
        est = -(tq(math.log(lam)).log_value - tq(0.0).log_value) / math.log(lam)
        kind = "index"
    return ProbeResult(u, np.atleast_1d(est), cls.gamma, kind)


# ---------------------------------------------------------------------------
# s(u) for the Gumbel members

def _check_gumbel(m: MemberId):
    if m not in GUMBEL_MEMBERS:
        raise UnsupportedMemberError(
            f"s(u) is only defined here for Burr V, VI, X and Xa, not {m.value}")


def _aux_s_log(m: MemberId, params: Params, log_u: np.ndarray) -> np.ndarray:
    """Closed-form s(u) from log u; exact in double precision down to log u = -inf."""
    k, r = params.k, params.r
    with np.errstate(all="ignore"):
        u = np.exp(log_u)
        l1mu = np.log1p(-u)
        if m is MemberId.Xa:
            eps = np.exp((1.0 - r) / r * l1mu)
            tail = -np.expm1(l1mu / r)  # 1 - (1-u)^{1/r}
        else:
            eps = np.exp(-(r + 1.0) / r * l1mu)
            tail = np.expm1(-l1mu / r)  # (1-u)^{-1/r} - 1
        log_d = np.where(log_u < _DEEP_TAIL, 0.0, log_u - math.log(r) - np.log(tail))
        eps = np.where(log_u < _DEEP_TAIL, 1.0, eps)
        ed = eps * np.exp(log_d)
        L = math.log(r) - log_u  # log(r/u)
        if m is MemberId.V:
            a = (math.log(k) + log_d) / L
            return L ** -2 * ed / ((1.0 + a) ** 2 + L ** -2)
        if m is MemberId.VI:
            a = (math.log(k) + log_d) / L
            return ed / (L * np.sqrt((1.0 + a) ** 2 + L ** -2))
        return 0.5 * ed / np.sqrt(L * (1.0 + log_d / L))


def _check_tail_u(u, u0):
    u = np.asarray(u, dtype=float)
    if np.any(~(u > 0.0)) or np.any(u >= u0):
        raise DomainError(f"u must lie in (0, {u0})")
    return u


def aux_s(member, params: Params, u, *, u0: float = 0.1):
    """de Haan auxiliary function s(u) = -u d/du F^{-1}(1-u), closed form."""
    m = MemberId.parse(member)
    _check_gumbel(m)
    u = _check_tail_u(u, u0)
    out = _aux_s_log(m, params, np.log(u))
    return out[()] if out.ndim == 0 else out


def aux_s_numeric(member, params: Params, u, *, step: float = FD_STEP):
    """s(u) by a central difference with step h = step * u in the u variable."""
    m = MemberId.parse(member)
    u = np.asarray(u, dtype=float)
    lu = np.log(u)
    up, dn = lu + math.log1p(step), lu + math.log1p(-step)
    if math.isfinite(support(m, params).uep):
        # derivative of the gap: -u dQ/du = u d(gap)/du
        gp = np.exp(tail_quantile(m, params, up).log_gap)
        gm = np.exp(tail_quantile(m, params, dn).log_gap)
        out = (gp - gm) / (2.0 * step)
    else:
        qp = tail_quantile(m, params, up).value
        qm = tail_quantile(m, params, dn).value
        out = -(qp - qm) / (2.0 * step)
    return out[()] if np.ndim(out) == 0 else out


def hb_limit(member, params: Params, n_grid: Sequence[float]) -> np.ndarray:
    """The sequence sqrt(n) s(e^{-n}), evaluated without forming e^{-n}."""
    m = MemberId.parse(member)
    _check_gumbel(m)
    n = np.atleast_1d(np.asarray(n_grid, dtype=float))
    if np.any(n <= 0):
        raise DomainError("n must be positive")
    return np.sqrt(n) * _aux_s_log(m, params, -n)


# ---------------------------------------------------------------------------
# b(u) for gamma != 0

def _density_gap_product(m: MemberId, params: Params, log_u: np.ndarray) -> np.ndarray:
    """f(Q(u)) * (uep - Q(u)) in a form that keeps precision near the endpoint."""
    r, c = params.r, params.c
    u = np.exp(log_u)
    l1mu = np.log1p(-u)
    if m is MemberId.I:
        return u
    if m is MemberId.IV:
        # with w = (1-u)^{-1/r} - 1: f * gap = r (1-u)^{(r+1)/r} w (1 + w^c) / c
        w = np.expm1(-l1mu / r)
        return r * np.exp((r + 1.0) / r * l1mu) * w * (1.0 + w ** c) / c
    if m is MemberId.XI:
        # f = r (1-h(X))^{r-1} 2 sin^2(pi X), with (1-h)^r = 1-u and X the gap
        X = np.exp(tail_quantile(m, params, log_u).log_gap)
        return r * np.exp((r - 1.0) / r * l1mu) * 2.0 * np.sin(math.pi * X) ** 2 * X
    raise UnsupportedMemberError(f"no finite-endpoint density for {m.value}")  # pragma: no cover


def aux_b(member, params: Params, u, *, u0: float = 0.1, step: float = FD_STEP):
    """Karamata second-order function b(u) (with a = 0) for gamma != 0 members."""
    m = MemberId.parse(member)
    cls = classify(m, params)
    if cls.gamma == 0.0:
        raise UnsupportedMemberError(f"b(u) needs gamma != 0; {m.value} is Gumbel-attracted")
    u = _check_tail_u(u, u0)
    lu = np.log(u)
    if cls.gamma < 0:
        out = -cls.gamma - u / _density_gap_product(m, params, lu)
    else:
        up, dn = lu + math.log1p(step), lu + math.log1p(-step)

        def log_q(log_u):
            tq = tail_quantile(m, params, log_u)
            return tq.value if cls.transform is Transform.LOG else tq.log_value

        # differentiate the slowly varying part log Q(u) + gamma log u
        fp = log_q(up) + cls.gamma * up
        fm = log_q(dn) + cls.gamma * dn
        out = -(fp - fm) / (2.0 * step)
    return out[()] if np.ndim(out) == 0 else out


def aux_functions(member, params: Params) -> AuxFunctions:
    """Bundle s, b and the (Hb) limit alpha for a member."""
    m = MemberId.parse(member)
    cls = classify(m, params)
    s = (lambda u: aux_s(m, params, u)) if m in GUMBEL_MEMBERS else None
    b = (lambda u: aux_b(m, params, u)) if cls.gamma != 0.0 else None
    alpha = None
    if m in (MemberId.V, MemberId.VI):
        alpha = 0.0
    elif m in (MemberId.X, MemberId.Xa):
        alpha = 0.5  # sqrt(n) * (1/2) (n + log r)^{-1/2} -> 1/2
    return AuxFunctions(s, b, alpha)


# ---------------------------------------------------------------------------
# mean excess

def mean_excess(member, params: Params, x: float, *, log_scale: bool = False,
                epsabs: float = 1e-8, epsrel: float = 1e-6) -> float:
    """R(x, F) = (1/(1-F(x))) * integral_x^uep (1 - F(y)) dy.

    With ``log_scale=True`` the function is R(x, G) for G(y) = F(e^y), the law
    of log X (positive-support members only).  The half line is mapped to
    [0, 1) by y = x + s t/(1-t) with s = max(1, |x|).
    """
    m = MemberId.parse(member)
    x = float(x)
    lep, uep = support(m, params)
    cls = classify(m, params)
    if log_scale:
        if lep < 0.0:
            raise DomainError("log_scale needs a member supported on the positive axis")
        lep, uep = -math.inf, math.log(uep) if math.isfinite(uep) else math.inf

        def surv(y):
            # beyond e^709 the survival of any member is below double range
            return sf(m, params, math.exp(y)) if y < 709.0 else 0.0
    else:
        if cls.transform is Transform.NONE and cls.gamma >= 1.0:
            raise DivergenceError(
                f"mean excess of {m.value} diverges: extreme value index {cls.gamma:g} >= 1")

        def surv(y):
            return sf(m, params, y)
    if not lep < x < uep or not math.isfinite(x):
        raise DomainError(f"x must lie inside the support ({lep}, {uep})")
    s0 = float(surv(x))
    if s0 <= 0.0:
        raise DomainError("survival function vanishes at x")
    if math.isfinite(uep):
        width = uep - x
        val, _ = integrate.quad(lambda t: surv(x + width * t) / s0, 0.0, 1.0,
                                epsabs=epsabs / width, epsrel=epsrel, limit=200)
        return float(val * width)
    scale = max(1.0, abs(x))

    def integrand(t):
        if t >= 1.0:
            return 0.0
        y = x + scale * t / (1.0 - t)
        return float(surv(y)) / s0 * scale / (1.0 - t) ** 2

    val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel, limit=400)
    return float(val)
