"""Command-line front end: ``burrecords <subcommand> --member M --param k=v ...``.

JSON (the default) carries a ``tool_version``/``seed``/``config`` echo so a
document can be replayed; CSV always starts with a header row.  Exit codes:
0 success, 1 numeric or runtime failure (reported as a JSON error
document), 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import __version__
from .asymptotics import record_hypothesis_test, run_experiment
from .distributions import PARAM_NAMES, MemberId, Params, cdf, quantile
from .evt import classify, probe_gamma
from .exceptions import BurrError
from .expansions import FORMS, exact_quantity, expand_quantile
from .records import simulate_records

SUBCOMMANDS = ("quantile", "cdf", "expand", "classify", "records", "experiment", "test")
SEED_MAX = 2 ** 64 - 1

# parameters the domain classification reads, per member
_CLASSIFY_PARAMS = {
    MemberId.III: ("k",), MemberId.IV: ("c",), MemberId.IX: ("r",), MemberId.XII: ("c", "r"),
    MemberId.SinghMaddala: ("c", "r"), MemberId.Dagum: ("b",), MemberId.ToppLeoneDagum: ("b", "d"),
}

EXAMPLES = {
    "quantile": "burrecords quantile --member I --p 0.3",
    "cdf": "burrecords cdf --member XII --param r=2 --param c=3 --x 0.5 --x 2",
    "expand": "burrecords expand --member XII --param r=2 --param c=1 --u 1e-4",
    "classify": "burrecords classify --member IV --param c=0.5",
    "records": "burrecords records --member II --param r=1 --n 50 --m 10 --seed 7 --format csv",
    "experiment": ("burrecords experiment --member II --param r=1 --n 1000 --m 5000 "
                   "--seed 42 --format json"),
    "test": "burrecords test --member I --n 10 --observed 1.5",
}

HELP = {
    "quantile": "quantile function F^{-1}(p)",
    "cdf": "distribution function F(x)",
    "expand": "second-order upper-tail quantile expansion at tail probability u",
    "classify": "extreme-value domain of attraction, optionally with numeric probes",
    "records": "simulate n-th record values (CSV: replication,n,s_n,s_star,value)",
    "experiment": "Monte Carlo check of the record limit law",
    "test": "asymptotic z-test that an observation is the n-th record",
}


@dataclass
class RunConfig:
    subcommand: str
    member: MemberId
    params: dict[str, float]
    fmt: str = "json"
    out: str | None = None
    threads: int = 1
    seed: int | None = None
    options: dict[str, Any] = field(default_factory=dict)

    def echo(self) -> dict[str, Any]:
        """Everything that determines the output; threads and out path do not."""
        return {"subcommand": self.subcommand, "member": self.member.value,
                "params": dict(sorted(self.params.items())), "format": self.fmt, **self.options}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# parsing

def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if not 0 <= v <= SEED_MAX:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="burrecords",
        description="Burr distributions, tail expansions, domains of attraction and record values.",
        epilog="examples:\n" + "\n".join(f"  {e}" for e in EXAMPLES.values()),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--member", required=True, help="I..XII, Xa, SinghMaddala, Dagum, ToppLeoneDagum")
    common.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                        help="shape parameter, repeatable (k, c, r, a, b, d, f)")
    common.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")
    common.add_argument("--out", help="write to this file instead of standard output")
    common.add_argument("--threads", type=_positive_int, default=1,
                        help="worker threads for replications; never changes the output")
    subs = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    def sub(name):
        return subs.add_parser(name, parents=[common], help=HELP[name], description=HELP[name],
                               epilog=f"example:\n  {EXAMPLES[name]}",
                               formatter_class=argparse.RawDescriptionHelpFormatter)

    p = sub("quantile")
    p.add_argument("--p", type=float, action="append", required=True, help="probability, repeatable")
    p = sub("cdf")
    p.add_argument("--x", type=float, action="append", required=True, help="point, repeatable")
    p = sub("expand")
    p.add_argument("--u", type=float, action="append", required=True, help="tail probability, repeatable")
    p.add_argument("--form", choices=FORMS, default="corrected")
    p = sub("classify")
    p.add_argument("--u", type=float, action="append", help="run the numeric probe at these u")
    p.add_argument("--lambda", type=float, default=2.0, dest="lam", help="probe ratio (default 2)")
    p = sub("records")
    p.add_argument("--n", type=_positive_int, required=True, help="record index")
    p.add_argument("--m", type=_positive_int, required=True, help="replications")
    p.add_argument("--seed", type=_seed, required=True)
    p = sub("experiment")
    p.add_argument("--n", type=_positive_int, required=True, help="record index (>= 10)")
    p.add_argument("--m", type=_positive_int, required=True, help="replications (>= 100)")
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--variant", choices=("canonical", "alternative"), default="canonical")
    p = sub("test")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--observed", type=float, help="observed record value")
    group.add_argument("--log-observed", type=float, help="log of the observed record value")
    p.add_argument("--n", type=_positive_int, required=True, help="record index")
    p.add_argument("--significance", type=float, default=0.05)
    p.add_argument("--variant", choices=("canonical", "alternative"), default="canonical")
    return parser


def _parse_params(member: MemberId, assignments: Sequence[str], required: Sequence[str]) -> dict[str, float]:
    allowed = PARAM_NAMES[member]
    out: dict[str, float] = {}
    for item in assignments:
        key, sep, text = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        if key not in allowed:
            names = ", ".join(allowed) or "none"
            raise UsageError(f"--param {key} is not a parameter of {member.value} (accepted: {names})")
        if key in out:
            raise UsageError(f"--param {key} given twice")
        try:
            out[key] = float(text)
        except ValueError:
            raise UsageError(f"--param {key}: {text!r} is not a number") from None
    missing = [k for k in required if k not in out]
    if missing:
        raise UsageError(f"{member.value} needs --param for: {', '.join(missing)}")
    return out


def parse_args(argv: Sequence[str]) -> RunConfig:
    """Validate argv into a RunConfig; usage problems exit with status 2."""
    parser = build_parser()
    ns = parser.parse_args(list(argv))
    try:
        member = MemberId.parse(ns.member)
    except BurrError as exc:
        parser.error(f"--member: {exc}")
    sc = ns.subcommand
    if sc == "classify" and not ns.u:
        required = _CLASSIFY_PARAMS.get(member, ())
    else:
        required = PARAM_NAMES[member]
    try:
        params = _parse_params(member, ns.param, required)
    except UsageError as exc:
        parser.error(str(exc))

    options: dict[str, Any] = {}
    seed = None
    if sc == "quantile":
        options["p"] = ns.p
    elif sc == "cdf":
        options["x"] = ns.x
    elif sc == "expand":
        options.update(u=ns.u, form=ns.form)
    elif sc == "classify":
        if ns.u:
            options.update(u=ns.u, lam=ns.lam)
    elif sc in ("records", "experiment"):
        seed = ns.seed
        options.update(n=ns.n, m=ns.m, seed=ns.seed)
        if sc == "experiment":
            options["variant"] = ns.variant
    elif sc == "test":
        options.update(n=ns.n, significance=ns.significance, variant=ns.variant)
        if ns.observed is not None:
            options["observed"] = ns.observed
        else:
            options["log_observed"] = ns.log_observed
    return RunConfig(sc, member, params, ns.fmt, ns.out, ns.threads, seed, options)


# ---------------------------------------------------------------------------
# execution

def _clean(v):
    """JSON-safe values: numpy scalars to Python, non-finite floats to null."""
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_clean(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _compute(cfg: RunConfig) -> tuple[Any, list[str], list[list[Any]]]:
    """Returns (JSON result, CSV header, CSV rows)."""
    P = Params(**cfg.params)
    m, o = cfg.member, cfg.options
    if cfg.subcommand == "quantile":
        q = np.atleast_1d(quantile(m, P, np.asarray(o["p"])))
        return ({"p": o["p"], "quantile": q.tolist()} if len(q) > 1 else {"p": o["p"][0], "quantile": float(q[0])},
                ["p", "quantile"], [[p, x] for p, x in zip(o["p"], q)])
    if cfg.subcommand == "cdf":
        F = np.atleast_1d(cdf(m, P, np.asarray(o["x"])))
        return ({"x": o["x"], "cdf": F.tolist()} if len(F) > 1 else {"x": o["x"][0], "cdf": float(F[0])},
                ["x", "cdf"], [[x, f] for x, f in zip(o["x"], F)])
    if cfg.subcommand == "expand":
        rows, docs = [], []
        for u in o["u"]:
            res = expand_quantile(m, P, u, form=o["form"])
            exact = exact_quantity(m, P, u)
            spec = res.remainder_spec
            docs.append({"u": u, "frame": res.frame.value, "leading": res.leading,
                         "correction": res.correction, "value": res.value, "exact": exact,
                         "remainder": exact - res.value,
                         "remainder_order": {"kind": spec.kind.value if spec.kind else None,
                                             "exponent": spec.exponent, "relative": spec.relative}})
            rows.append([u, res.frame.value, res.leading, res.correction, res.value, exact, exact - res.value])
        return (docs if len(docs) > 1 else docs[0],
                ["u", "frame", "leading", "correction", "value", "exact", "remainder"], rows)
    if cfg.subcommand == "classify":
        cls = classify(m, P)
        doc: dict[str, Any] = {"gamma": cls.gamma, "uep": cls.uep if math.isfinite(cls.uep) else "inf",
                               "transform": cls.transform.value}
        header = ["member", "gamma", "uep", "transform"]
        rows = [[m.value, cls.gamma, cls.uep, cls.transform.value]]
        if "u" in o:
            pr = probe_gamma(m, P, o["lam"], o["u"])
            doc["probe"] = {"kind": pr.kind, "target": pr.target, "lambda": o["lam"],
                            "u": pr.u.tolist(), "estimates": pr.estimates.tolist()}
            header = ["member", "gamma", "uep", "transform", "probe_kind", "u", "estimate", "target"]
            rows = [[m.value, cls.gamma, cls.uep, cls.transform.value, pr.kind, u, e, pr.target]
                    for u, e in zip(pr.u, pr.estimates)]
        return doc, header, rows
    if cfg.subcommand == "records":
        draws = simulate_records(m, P, o["n"], o["m"], cfg.seed, threads=cfg.threads)
        rows = [[i, d.n, d.s_n, d.s_star, d.value] for i, d in enumerate(draws)]
        doc = [{"replication": i, "n": d.n, "s_n": d.s_n, "s_star": d.s_star, "value": d.value,
                "log_value": d.log_value, "log_gap": d.log_gap, "overflow": d.overflow}
               for i, d in enumerate(draws)]
        return {"records": doc}, ["replication", "n", "s_n", "s_star", "value"], rows
    if cfg.subcommand == "experiment":
        rep = run_experiment(m, P, o["n"], o["m"], cfg.seed, o["variant"], threads=cfg.threads)
        doc = {"n": rep.n, "m": rep.m, "variant": rep.variant.value,
               "target": {"shape": rep.target.shape.value, "mean": rep.target.mean,
                          "variance": rep.target.variance},
               "ks_distance": rep.ks_distance, "ks_pvalue": rep.ks_pvalue,
               "sample_mean": rep.sample_mean, "sample_variance": rep.sample_variance,
               "failures": rep.failures, "warning": rep.warning}
        rows = [[i, s] for i, s in enumerate(rep.statistics)]
        return doc, ["index", "statistic"], rows
    res = record_hypothesis_test(o.get("observed"), o["n"], m, P, o["significance"], o["variant"],
                                 log_observed=o.get("log_observed"))
    doc = {"statistic": res.statistic, "pvalue": res.pvalue, "reject": res.reject, "flag": res.flag}
    return doc, ["statistic", "pvalue", "reject", "flag"], [[res.statistic, res.pvalue, res.reject, res.flag or ""]]


def _render_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _render_json(doc) -> str:
    return json.dumps(_clean(doc), indent=2, allow_nan=False) + "\n"


def run(cfg: RunConfig) -> tuple[int, str]:
    """Dispatch a validated config; returns (exit code, document text)."""
    echo = {"tool_version": __version__, "seed": cfg.seed, "config": cfg.echo()}
    try:
        result, header, rows = _compute(cfg)
    except (BurrError, ArithmeticError, ValueError) as exc:
        err = {**echo, "error": str(exc), "context": {"type": type(exc).__name__,
                                                      "subcommand": cfg.subcommand,
                                                      "member": cfg.member.value}}
        return 1, _render_json(err)
    if cfg.fmt == "csv":
        return 0, _render_csv(header, rows)
    return 0, _render_json({**echo, "result": result})


def main(argv: Sequence[str] | None = None) -> int:
    cfg = parse_args(sys.argv[1:] if argv is None else argv)
    code, text = run(cfg)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
