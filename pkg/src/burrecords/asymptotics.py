"""Limit laws of standardized record values, the Monte Carlo harness that
checks them, and the z-test built on them.

Every statistic is returned in the normal frame: members whose limit is
exp(N(0, s^2)) are reported through n^{-1/2} log of the scaled quantity,
so a single Gaussian KS routine covers all members.

With the partial-sum representation a record is a deterministic function
of S_n, so statistic - gamma_eff * S_n^* is a deterministic function of S_n
as well (the coupling residual).  For most members it is exponentially
small in n and far below the rounding error of the float statistic; it is
evaluated in closed form with mpmath, using cancellation-free series for
the few functions that would otherwise subtract nearly equal numbers.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import mpmath as mp
import numpy as np
from scipy.special import ndtr

from .distributions import MemberId, Params, support, tail_quantile
from .evt import _aux_s_log
from .exceptions import DomainError, StatisticError, UnsupportedMemberError
from .expansions import xi_constants
from .records import RecordDraw, replication_rng, simulate_record

KS_MIN_SAMPLE = 8
FAILURE_WARN_FRACTION = 0.01
_RESIDUAL_DPS = 40

LIMIT_MEMBERS = (
    MemberId.I, MemberId.II, MemberId.III, MemberId.IV, MemberId.V, MemberId.VI,
    MemberId.VII, MemberId.VIII, MemberId.IX, MemberId.X, MemberId.XI, MemberId.XII,
    MemberId.Xa,
)
ALTERNATIVE_MEMBERS = (MemberId.V, MemberId.VI, MemberId.X, MemberId.Xa)
LOGNORMAL_MEMBERS = (MemberId.I, MemberId.III, MemberId.IV, MemberId.XI, MemberId.XII)


class LawShape(str, enum.Enum):
    NORMAL = "normal"
    LOG_NORMAL = "log-of-variable-is-normal"


class Variant(str, enum.Enum):
    CANONICAL = "canonical"
    ALTERNATIVE = "alternative"


class LawSpec(NamedTuple):
    """Limit law; for LOG_NORMAL, mean and variance refer to the logarithm."""

    shape: LawShape
    mean: float
    variance: float


@dataclass(frozen=True)
class StatisticForm:
    """statistic = (T(X) - centering(n)) / scaling(n).

    ``transform`` names T: "identity", "log" (log X), "log-gap"
    (log(uep - X)), "exp" (e^X) or "neg-gap" (X - uep, used so that the
    alternative Burr V statistic is a difference of gaps).
    """

    member: MemberId
    variant: Variant
    transform: str
    centering: Callable[[int], float]
    scaling: Callable[[int], float]
    gamma_eff: float


@dataclass(frozen=True)
class ExperimentReport:
    member: MemberId
    params: Params
    n: int
    m: int
    seed: int
    variant: Variant
    statistics: np.ndarray = field(repr=False)
    target: LawSpec
    ks_distance: float
    ks_pvalue: float
    sample_mean: float
    sample_variance: float
    failures: int = 0
    warning: bool = False


class KSResult(NamedTuple):
    distance: float
    pvalue: float


class HypothesisTestResult(NamedTuple):
    statistic: float
    pvalue: float
    reject: bool
    flag: str | None = None


# ---------------------------------------------------------------------------
# statistic forms and target laws

def _limit_member(member) -> MemberId:
    m = MemberId.parse(member)
    if m not in LIMIT_MEMBERS:
        raise UnsupportedMemberError(f"no record limit law is tabulated for {m.value}")
    return m


def _variant(variant) -> Variant:
    try:
        return Variant(variant)
    except ValueError:
        raise DomainError(f"unknown variant {variant!r}; use canonical or alternative") from None


def gamma_eff(member, params: Params, variant="canonical") -> float:
    """Coefficient g with statistic = g * S_n^* + (vanishing terms)."""
    m = _limit_member(member)
    if _variant(variant) is Variant.ALTERNATIVE:
        _check_alternative(m)
        return 1.0
    k, c, r = params.k, params.c, params.r
    return {
        MemberId.I: -1.0, MemberId.II: 1.0, MemberId.III: 1.0 / k, MemberId.IV: -c,
        MemberId.V: -1.0, MemberId.VI: 1.0, MemberId.VII: 0.5, MemberId.VIII: 1.0,
        MemberId.IX: 1.0 / r, MemberId.X: 0.5, MemberId.XI: -1.0 / 3.0,
        MemberId.XII: 1.0 / (r * c), MemberId.Xa: 0.5,
    }[m]


def target_law(member, params: Params, variant="canonical") -> LawSpec:
    m = _limit_member(member)
    g = gamma_eff(m, params, variant)
    shape = LawShape.LOG_NORMAL if (m in LOGNORMAL_MEMBERS and _variant(variant) is Variant.CANONICAL) \
        else LawShape.NORMAL
    return LawSpec(shape, 0.0, g * g)


def _check_alternative(m: MemberId):
    if m not in ALTERNATIVE_MEMBERS:
        raise UnsupportedMemberError(
            f"the alternative statistic exists only for V, VI, X and Xa, not {m.value}")


def statistic_form(member, params: Params, variant="canonical") -> StatisticForm:
    m = _limit_member(member)
    v = _variant(variant)
    g = gamma_eff(m, params, v)
    k, c, r = params.k, params.c, params.r
    root = math.sqrt

    if v is Variant.ALTERNATIVE:
        def s_scale(n):
            return float(_aux_s_log(m, params, np.array([-float(n)]))[0]) * root(n)
        if m is MemberId.V:
            def centering(n):
                return -math.exp(float(tail_quantile(m, params, -float(n)).log_gap))
            return StatisticForm(m, v, "neg-gap", centering, s_scale, g)
        return StatisticForm(m, v, "identity",
                             lambda n: float(tail_quantile(m, params, -float(n)).value), s_scale, g)

    if m is MemberId.I:
        return StatisticForm(m, v, "log-gap", lambda n: -n, root, g)
    if m is MemberId.II:
        return StatisticForm(m, v, "identity", lambda n: n, root, g)
    if m is MemberId.III:
        return StatisticForm(m, v, "log", lambda n: (math.log(r) + n) / k, root, g)
    if m is MemberId.IV:
        return StatisticForm(m, v, "log-gap", lambda n: math.log(c) - c * math.log(r) - c * n, root, g)
    if m is MemberId.V:
        return StatisticForm(m, v, "log-gap", lambda n: -math.log(n), lambda n: 1.0 / root(n), g)
    if m is MemberId.VI:
        def centre(n):
            t = n + math.log(k * r)
            if t <= 0:
                raise StatisticError(f"n + log(kr) = {t} is not positive")
            return 2.0 * t
        return StatisticForm(m, v, "exp", centre, lambda n: centre(n) / root(n), g)
    if m is MemberId.VII:
        return StatisticForm(m, v, "identity", lambda n: n / 2 + 0.5 * math.log(r), root, g)
    if m is MemberId.VIII:
        return StatisticForm(m, v, "identity", lambda n: n + math.log(2 * r / math.pi), root, g)
    if m is MemberId.IX:
        return StatisticForm(m, v, "identity", lambda n: (n + math.log(2 / k)) / r, root, g)
    if m in (MemberId.X, MemberId.Xa):
        return StatisticForm(m, v, "log", lambda n: 0.5 * math.log(n), lambda n: 1.0 / root(n), g)
    if m is MemberId.XI:
        log_alpha = math.log(xi_constants(r).alpha_fit)
        return StatisticForm(m, v, "log-gap", lambda n: -(log_alpha + n) / 3, root, g)
    return StatisticForm(m, v, "log", lambda n: n / (r * c), root, g)  # XII


# ---------------------------------------------------------------------------
# standardized statistics

class _Point(NamedTuple):
    value: float
    log_value: float
    log_gap: float


def _point_of(draw: RecordDraw) -> _Point:
    return _Point(draw.value, draw.log_value, draw.log_gap)


def _point_of_observation(m: MemberId, params: Params, x: float) -> _Point:
    lep, uep = support(m, params)
    log_value = math.log(x) if x > 0 else math.nan
    log_gap = math.log(uep - x) if math.isfinite(uep) and x < uep else math.nan
    return _Point(x, log_value, log_gap)


def _apply(form: StatisticForm, pt: _Point, n: int) -> float:
    t, centre, scale = form.transform, form.centering(n), form.scaling(n)
    if t == "identity":
        if not math.isfinite(pt.value):
            raise StatisticError(f"record value {pt.value} is not finite")
        diff = pt.value - centre
    elif t == "exp":
        diff = math.exp(pt.value) - centre
    elif t in ("log", "log-gap"):
        lv = pt.log_value if t == "log" else pt.log_gap
        if not math.isfinite(lv):
            what = "record value" if t == "log" else "endpoint gap"
            raise StatisticError(f"log of nonpositive {what} at n={n}")
        diff = lv - centre
    else:  # neg-gap: (uep - gap) - (uep - gap_n) = gap_n - gap
        gap_n = -centre
        diff = gap_n * -math.expm1(pt.log_gap - math.log(gap_n))
    return diff / scale


def standardized_statistic(member, params: Params, draw: RecordDraw, variant="canonical") -> float:
    """The standardized n-th record in the normal frame."""
    m = _limit_member(member)
    if draw.n < 2:
        raise DomainError("standardized statistics need n >= 2")
    return _apply(statistic_form(m, params, variant), _point_of(draw), draw.n)


def printed_statistic(member, params: Params, draw: RecordDraw) -> float:
    """The power-form statistic as displayed, e.g. (e^n (1 - X))^{n^{-1/2}} for Burr I.

    Computed literally in floating point (gaps from log_gap), so it is
    usable only while e^n and the scaled quantity stay representable.
    """
    m = _limit_member(member)
    if m not in LOGNORMAL_MEMBERS:
        raise UnsupportedMemberError(f"{m.value} has no power-form statistic")
    try:
        return _printed(m, params, draw)
    except OverflowError:
        raise StatisticError(f"printed statistic is not representable at n={draw.n}") from None


def _printed(m: MemberId, params: Params, draw: RecordDraw) -> float:
    n, k, c, r = draw.n, params.k, params.c, params.r
    gap = math.exp(draw.log_gap)
    if m is MemberId.I:
        base = math.exp(n) * gap
    elif m is MemberId.III:
        base = draw.value / (r ** (1 / k) * math.exp(n / k))
    elif m is MemberId.IV:
        base = r ** c * math.exp(c * n) / c * gap
    elif m is MemberId.XI:
        base = xi_constants(r).alpha_fit ** (1 / 3) * math.exp(n / 3) * gap
    else:
        base = draw.value / math.exp(n / (r * c))
    return base ** (1 / math.sqrt(n))


# ---------------------------------------------------------------------------
# coupling residual

def _series(term: Callable[[int], object], tol) -> object:
    """Sum term(1) + term(2) + ... until a term drops below tol * |sum|."""
    total, j = mp.mpf(0), 1
    while True:
        t = term(j)
        total += t
        if abs(t) <= tol * abs(total) or j > 400:
            return total
        j += 1


def _log_rel_log1p(u):
    """log(-log1p(-u)/u) without cancellation."""
    if u > 0.25:
        return mp.log(-mp.log1p(-u) / u)
    return mp.log1p(_series(lambda j: u ** j / (j + 1), mp.eps))


def _log_rel_expm1(y):
    """log(expm1(y)/y) without cancellation (y of either sign)."""
    if abs(y) > 0.25:
        return mp.log(mp.expm1(y) / y)
    return mp.log1p(_series(lambda j: y ** j / mp.factorial(j + 1), mp.eps))


def _log_rel_tan(z):
    """log(tan(z)/z) for 0 < z < pi/2."""
    if z > 0.25:
        return mp.log(mp.tan(z) / z)
    num = _series(lambda j: (-1) ** (j + 1) * 2 * j * z ** (2 * j + 1) / mp.factorial(2 * j + 1), mp.eps)
    return mp.log1p(num / (z * mp.cos(z)))


def _log_rel_h(x):
    """log(6 (x - sin x) / x^3) for 0 < x."""
    if x > 0.25:
        return mp.log(6 * (x - mp.sin(x)) / x ** 3)
    return mp.log1p(_series(lambda j: (-1) ** j * 6 * x ** (2 * j) / mp.factorial(2 * j + 3), mp.eps))


def _exact_residual_sqrt_n(m: MemberId, params: Params, s_n: float):
    """sqrt(n) * coupling residual as an mpf, or None if the float value is exact enough.

    u = e^{-S}.  With y = -log1p(-u)/r, the building blocks are
    omega = log(w r/u) for w = expm1(y) = (1-u)^{-1/r} - 1, and
    mu = log(m_ r/u) for m_ = -expm1(-y) = 1 - (1-u)^{1/r}.
    """
    k, c, r = (mp.mpf(params.k), mp.mpf(params.c), mp.mpf(params.r))
    S = mp.mpf(s_n)
    u = mp.exp(-S)
    A = _log_rel_log1p(u)
    y = u / r * mp.exp(A)
    omega = A + _log_rel_expm1(y)
    if m is MemberId.II:
        return mp.log(r) - omega
    if m is MemberId.III:
        return -omega / k
    if m is MemberId.VII:
        return -omega / 2
    if m is MemberId.IV:
        log_w = -S - mp.log(r) + omega
        return c * omega - mp.log1p(mp.exp(c * log_w))
    if m is MemberId.VIII:
        mu = A + _log_rel_expm1(-y)
        z = mp.pi / 2 * y * mp.exp(_log_rel_expm1(-y))
        return -mu - _log_rel_tan(z)
    if m is MemberId.IX:
        log_A = mp.log(2 / k) + S + mp.log1p(-(2 - k) * u / 2)
        return mp.log1p(-(2 - k) * u / 2) / r + mp.log1p(-mp.exp(-log_A / r))
    if m is MemberId.XII:
        return mp.log1p(-mp.exp(-S / r)) / c
    if m is MemberId.XI:
        alpha0 = (2 * mp.pi) ** 2 / 6
        mu = A + _log_rel_expm1(-y)
        log_target = -S - mp.log(r) + mu  # log m_
        g = mp.exp((log_target - mp.log(alpha0)) / 3)
        for _ in range(200):
            g_new = mp.exp((log_target - mp.log(alpha0) - _log_rel_h(2 * mp.pi * g)) / 3)
            if abs(g_new - g) <= mp.eps * g:
                break
            g = g_new
        log_alpha_fit = mp.log(mp.mpf(xi_constants(params.r).alpha_fit))
        log_alpha = mp.log(r * alpha0)
        return (log_alpha_fit - log_alpha + mu - _log_rel_h(2 * mp.pi * g)) / 3
    return None


def coupling_residual(member, params: Params, draw: RecordDraw, variant="canonical", *,
                      log_abs: bool = False) -> float:
    """statistic - gamma_eff * S_n^*, a deterministic function of S_n.

    Exponentially small residuals are evaluated in closed form at 40
    significant digits and unlimited exponent range; with ``log_abs=True``
    the result is log|residual|, which stays finite after the residual
    itself underflows (-inf only when the residual is exactly 0).
    """
    m = _limit_member(member)
    v = _variant(variant)
    if draw.n < 2:
        raise DomainError("standardized statistics need n >= 2")
    exact = None
    if v is Variant.CANONICAL and m is MemberId.I:
        exact = mp.mpf(0)
    elif v is Variant.CANONICAL:
        with mp.workdps(_RESIDUAL_DPS):
            exact = _exact_residual_sqrt_n(m, params, draw.s_n)
            if exact is not None:
                exact = exact / mp.sqrt(draw.n)
    if exact is None:
        res = standardized_statistic(m, params, draw, v) - gamma_eff(m, params, v) * draw.s_star
        if log_abs:
            return math.log(abs(res)) if res != 0 else -math.inf
        return res
    with mp.workdps(_RESIDUAL_DPS):
        if log_abs:
            return float(mp.log(abs(exact))) if exact != 0 else -math.inf
        return float(exact)


def log_median_abs(log_abs_values: Sequence[float]) -> float:
    """log of the median of |x| given log|x|, without leaving log space."""
    v = np.sort(np.asarray(log_abs_values, dtype=float))
    if v.size == 0:
        raise DomainError("empty sample")
    mid = v.size // 2
    if v.size % 2:
        return float(v[mid])
    return float(np.logaddexp(v[mid - 1], v[mid]) - math.log(2.0))


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov

def kolmogorov_sf(t: float, terms: int = 100) -> float:
    """P(K > t) for the Kolmogorov limit law.

    For t >= 1 the alternating series 2 sum (-1)^{j-1} exp(-2 j^2 t^2) is
    used, for t < 1 the Jacobi theta form of the cdf; both are summed until
    a term is below 1e-16 and for at least 10 terms.
    """
    if t <= 0:
        return 1.0
    if t >= 1.0:
        total = 0.0
        for j in range(1, terms + 1):
            term = math.exp(-2.0 * j * j * t * t)
            total += term if j % 2 else -term
            if j >= 10 and term < 1e-16:
                break
        return min(1.0, max(0.0, 2.0 * total))
    total = 0.0
    for j in range(1, terms + 1):
        term = math.exp(-((2 * j - 1) ** 2) * math.pi ** 2 / (8.0 * t * t))
        total += term
        if j >= 10 and term < 1e-16 * max(total, 1e-300):
            break
    return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / t * total))


def ks_test(sample: Sequence[float], law: LawSpec) -> KSResult:
    """One-sample KS distance against N(mean, variance) and its asymptotic p-value."""
    x = np.sort(np.asarray(sample, dtype=float))
    m = x.size
    if m < KS_MIN_SAMPLE:
        raise DomainError(f"KS test needs at least {KS_MIN_SAMPLE} observations, got {m}")
    if not np.all(np.isfinite(x)):
        raise DomainError("KS sample contains non-finite values")
    if not law.variance > 0:
        raise DomainError("law variance must be positive")
    F = ndtr((x - law.mean) / math.sqrt(law.variance))
    i = np.arange(1, m + 1)
    distance = float(max(np.max(i / m - F), np.max(F - (i - 1) / m)))
    if x[0] == x[-1]:
        return KSResult(distance, 0.0)
    return KSResult(distance, kolmogorov_sf(math.sqrt(m) * distance))


# ---------------------------------------------------------------------------
# experiments and tests

def run_experiment(member, params: Params, n: int, m: int, seed: int,
                   variant="canonical", threads: int = 1) -> ExperimentReport:
    """m replications of the standardized n-th record, KS against the limit law.

    Replication i uses ``replication_rng(seed, i)`` and results are placed
    by index, so the report does not depend on ``threads``.
    """
    mem = _limit_member(member)
    v = _variant(variant)
    if int(n) < 10 or int(m) < 100:
        raise DomainError("experiments need n >= 10 and m >= 100")
    n, m = int(n), int(m)
    if v is Variant.ALTERNATIVE:
        _check_alternative(mem)
    form = statistic_form(mem, params, v)
    law = target_law(mem, params, v)

    def one(i: int) -> float:
        draw = simulate_record(mem, params, n, replication_rng(seed, i))
        try:
            return _apply(form, _point_of(draw), n)
        except (StatisticError, OverflowError, ValueError):
            return math.nan

    if threads <= 1:
        values = [one(i) for i in range(m)]
    else:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            values = list(pool.map(one, range(m)))
    values = np.asarray(values, dtype=float)
    ok = np.isfinite(values)
    stats = values[ok]
    failures = int(m - stats.size)
    if stats.size < KS_MIN_SAMPLE:
        raise StatisticError(f"only {stats.size} of {m} replications gave a finite statistic")
    ks = ks_test(stats, law)
    return ExperimentReport(
        member=mem, params=params, n=n, m=m, seed=int(seed), variant=v,
        statistics=stats, target=law, ks_distance=ks.distance, ks_pvalue=ks.pvalue,
        sample_mean=float(np.mean(stats)), sample_variance=float(np.var(stats, ddof=1)),
        failures=failures, warning=failures > FAILURE_WARN_FRACTION * m,
    )


def record_hypothesis_test(observed: float | None, n: int, member, params: Params,
                           significance: float = 0.05, variant="canonical", *,
                           log_observed: float | None = None) -> HypothesisTestResult:
    """Two-sided asymptotic z-test of 'observed is the n-th record of this member'.

    Heavy-tailed records overflow a double long before the limit law is
    accurate (Burr XII with rc = 1 at n = 1000 is near e^1000), so the
    observation may be given as ``log_observed`` instead, for members whose
    support is (0, inf).
    """
    m = _limit_member(member)
    if not 0.0 < significance < 1.0:
        raise DomainError("significance must lie in (0, 1)")
    if int(n) < 2:
        raise DomainError("standardized statistics need n >= 2")
    if (observed is None) == (log_observed is None):
        raise DomainError("give exactly one of observed and log_observed")
    lep, uep = support(m, params)
    if log_observed is not None:
        if not (lep == 0.0 and math.isinf(uep)):
            raise DomainError(f"log-scale observations need support (0, inf); {m.value} has ({lep}, {uep})")
        lo = float(log_observed)
        if math.isnan(lo) or math.isinf(lo):
            return HypothesisTestResult(math.nan, 0.0, True, "support-violation")
        point = _Point(math.exp(lo) if lo < 709.0 else math.inf, lo, math.nan)
    else:
        x = float(observed)
        if not (math.isfinite(x) and lep <= x < uep):
            return HypothesisTestResult(math.nan, 0.0, True, "support-violation")
        point = _point_of_observation(m, params, x)
    try:
        stat = _apply(statistic_form(m, params, variant), point, int(n))
    except (StatisticError, OverflowError):
        return HypothesisTestResult(math.nan, 0.0, True, "statistic-undefined")
    z = stat / math.sqrt(target_law(m, params, variant).variance)
    p = float(2.0 * ndtr(-abs(z)))
    return HypothesisTestResult(z, p, p < significance, None)
