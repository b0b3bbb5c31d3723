"""Record values: the exponential partial-sum representation and a direct
stream-extraction oracle.

If E_1, E_2, ... are unit exponentials and S_n = E_1 + ... + E_n, the n-th
strict record of an iid F-sequence has the law of F^{-1}(1 - exp(-S_n)).
The simulator evaluates that quantile through ``tail_quantile`` with
log u = -S_n, so 1 - exp(-S_n) is never formed in floating point.

Random streams: every replication gets its own generator derived from
(master seed, replication index), so a result never depends on how
replications are scheduled across threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .distributions import MemberId, Params, sample, tail_quantile, uniform_open
from .exceptions import DomainError

STREAM_CAP = 1_000_000
_FIRST_CHUNK = 256


@dataclass(frozen=True)
class RecordDraw:
    """The n-th record value with the partial sum that generated it.

    ``value`` is F^{-1}(1 - exp(-s_n)).  ``log_value`` (members on (0, inf))
    and ``log_gap`` (members with a finite upper endpoint) keep the
    resolution that ``value`` loses deep in the tail; ``overflow`` is set
    when ``value`` itself is inf and only ``log_value`` is finite.
    """

    n: int
    value: float
    s_n: float
    s_star: float
    log_value: float = math.nan
    log_gap: float = math.nan
    overflow: bool = False


@dataclass(frozen=True)
class StreamRecords:
    """Strict records of a finite stream and their (1-based) record times."""

    records: np.ndarray
    times: np.ndarray


def _check_n(n) -> int:
    if isinstance(n, bool) or int(n) != n or int(n) < 1:
        raise DomainError(f"record index must be an integer >= 1, got {n!r}")
    return int(n)


def replication_rng(seed: int, index: int, attempt: int = 0) -> np.random.Generator:
    """Independent generator for replication ``index`` under master ``seed``.

    Philox is counter based and the SeedSequence spawn key makes the stream
    a pure function of (seed, index); ``attempt`` > 0 gives the substreams
    used to redraw a replication.
    """
    key = (int(index),) if attempt == 0 else (int(index), int(attempt))
    ss = np.random.SeedSequence(int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def unit_exponentials(rng, size: int) -> np.ndarray:
    """E = -log U with U uniform on the open interval (0, 1)."""
    return -np.log(uniform_open(rng, size))


def record_from_sum(member, params: Params, n: int, s_n: float) -> RecordDraw:
    """The n-th record generated by a given partial sum S_n."""
    n = _check_n(n)
    s_n = float(s_n)
    if not math.isfinite(s_n) or s_n <= 0.0:
        raise DomainError(f"partial sum must be positive and finite, got {s_n!r}")
    tp = tail_quantile(member, params, -s_n)
    value = float(tp.value)
    return RecordDraw(
        n=n,
        value=value,
        s_n=s_n,
        s_star=(s_n - n) / math.sqrt(n),
        log_value=float(tp.log_value),
        log_gap=float(tp.log_gap),
        overflow=math.isinf(value),
    )


def simulate_record(member, params: Params, n: int, rng) -> RecordDraw:
    """Draw n unit exponentials and return the n-th record they generate."""
    n = _check_n(n)
    member = MemberId.parse(member)
    s = np.cumsum(unit_exponentials(rng, n))
    return record_from_sum(member, params, n, s[-1])


def record_path(member, params: Params, n: int, rng) -> list[RecordDraw]:
    """Records 1..n jointly: the k-th entry uses the prefix sum S_k."""
    n = _check_n(n)
    member = MemberId.parse(member)
    s = np.cumsum(unit_exponentials(rng, n))
    tp = tail_quantile(member, params, -s)
    values, log_values, log_gaps = (np.atleast_1d(v) for v in tp)
    k = np.arange(1, n + 1)
    s_star = (s - k) / np.sqrt(k)
    return [
        RecordDraw(int(k[i]), float(values[i]), float(s[i]), float(s_star[i]),
                   float(log_values[i]), float(log_gaps[i]), bool(np.isinf(values[i])))
        for i in range(n)
    ]


def simulate_records(member, params: Params, n: int, m: int, seed: int,
                     threads: int = 1) -> list[RecordDraw]:
    """m independent n-th records, replication i drawn from ``replication_rng(seed, i)``.

    The output is ordered by replication index and identical for every
    ``threads`` value.
    """
    n = _check_n(n)
    if int(m) < 1:
        raise DomainError(f"replication count must be at least 1, got {m!r}")
    member = MemberId.parse(member)

    def one(i: int) -> RecordDraw:
        return simulate_record(member, params, n, replication_rng(seed, i))

    if threads <= 1:
        return [one(i) for i in range(int(m))]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(one, range(int(m))))


def extract_records(stream) -> StreamRecords:
    """Strict running maxima of ``stream`` scanned left to right."""
    x = np.asarray(stream, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("cannot extract records from an empty stream")
    if np.any(np.isnan(x)):
        raise DomainError("stream contains nan")
    prev = np.maximum.accumulate(x)[:-1]
    is_record = np.concatenate(([True], x[1:] > prev))
    idx = np.flatnonzero(is_record)
    return StreamRecords(records=x[idx], times=idx + 1)


def stream_record(member, params: Params, n: int, rng, cap: int = STREAM_CAP) -> float | None:
    """The n-th strict record of an iid stream, or None if ``cap`` draws do not produce it.

    The stream is generated in doubling chunks; the running maximum is
    carried across chunk boundaries.
    """
    n = _check_n(n)
    member = MemberId.parse(member)
    found = 0
    current = -math.inf
    used = 0
    size = _FIRST_CHUNK
    while used < cap:
        size = min(size, cap - used)
        chunk = sample(member, params, size, rng)
        used += size
        new = extract_records(np.concatenate(([current], chunk))).records[1:]
        if found + new.size >= n:
            return float(new[n - found - 1])
        found += new.size
        if new.size:
            current = float(new[-1])
        size *= 2
    return None


def stream_records(member, params: Params, n: int, m: int, seed: int,
                   cap: int = STREAM_CAP) -> tuple[np.ndarray, int]:
    """m n-th records by stream extraction, plus the number of resampled replications.

    A replication that hits the cap is redrawn from the next substream of
    the same replication index, so the result is still a function of
    (seed, index) alone.
    """
    n = _check_n(n)
    out = np.empty(int(m))
    resampled = 0
    for i in range(int(m)):
        attempt = 0
        while True:
            value = stream_record(member, params, n, replication_rng(seed, i, attempt), cap)
            if value is not None:
                out[i] = value
                break
            resampled += 1
            attempt += 1
    return out, resampled
