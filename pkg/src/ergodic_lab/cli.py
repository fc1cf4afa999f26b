"""Command-line interface: ``ergodic-lab <subcommand> ...``.

Exit codes: 0 every verdict passed, 2 some verdict failed, 3 something was
unconverged or undecided, 1 bad input or a violated precondition.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

from . import experiments as ex
from .certificate import (FAIL, PASS, UNCONVERGED, UNKNOWN, Certificate, canonical_dumps,
                          combine_verdicts)
from .measure import PreconditionError, as_fraction, from_json, rearrangement, to_json
from .operators import (DomainError, cesaro_average, maximal_function,
                        operator_from_json, verify_ds)
from .spaces import met_predicate, met_report, norm, space_from_json

EXIT = {PASS: 0, FAIL: 2, UNCONVERGED: 3, UNKNOWN: 3}


class InputError(ValueError):
    """Malformed user input; reported with exit code 1."""


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (1), not mathematical failures (2)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_json(text: str, what: str):
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON in {what} at line {e.lineno} column {e.colno}: {e.msg}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"expected a comma-separated integer list, got {text!r}")


def _frac_list(text: str) -> list[Fraction]:
    try:
        return [as_fraction(x.strip()) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise InputError(f"expected a comma-separated rational list, got {text!r}")


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("ERGODIC_LAB_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"ERGODIC_LAB_SEED must be an integer, got {env!r}")
    return 0


# -- experiment configs ----------------------------------------------------------

@dataclass
class ExperimentConfig:
    """One job: an experiment id plus its inputs.  Unknown fields are rejected."""

    experiment: str
    id: str = ""
    operator: dict | None = None
    f: dict | None = None
    space: dict | None = None
    n: list | None = None
    N: int = 64
    p: int = 1
    lambdas: list | None = None
    eps: str = "1/8"
    J: int = 10
    tol: str | None = None
    kind: str = "continuous"
    count: int | None = None
    alpha: dict | float | None = None
    length: int | None = None
    fs: list | None = None
    seed: int | None = None

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        if not isinstance(obj, dict) or "experiment" not in obj:
            raise InputError("each job needs an 'experiment' field")
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise InputError(f"unknown config fields: {sorted(unknown)}")
        return cls(**obj)


def _operator(cfg):
    if cfg.operator is None:
        raise InputError(f"{cfg.experiment} needs an operator")
    return operator_from_json(cfg.operator)


def _function(obj, what="f"):
    if obj is None:
        raise InputError(f"missing function {what}")
    return from_json(obj)


def _met_certificate(space: dict) -> Certificate:
    X = space_from_json(space)
    m = met_predicate(X)
    verdict = UNKNOWN if m is None else (PASS if m else FAIL)
    return Certificate("met", verdict, {"space": space}, met_report(X), bound="met predicate")


def run_job(cfg: ExperimentConfig, seed: int) -> tuple[Certificate, str | None]:
    """Run one experiment; returns the certificate and an optional CSV table."""
    seed = cfg.seed if cfg.seed is not None else seed
    e = cfg.experiment
    if e == "hopf":
        if cfg.operator is None:
            return ex.hopf_batch(seed, cfg.count or 500, N=cfg.N), None
        return ex.hopf_check(_operator(cfg), _function(cfg.f), cfg.N), None
    if e == "maxineq":
        lambdas = cfg.lambdas or [Fraction(k, 2) for k in range(1, 21)]
        if cfg.operator is None:
            return ex.maxineq_batch(seed, cfg.count or 200, N=cfg.N, lambdas=lambdas), None
        return ex.maximal_inequality_check(_operator(cfg), _function(cfg.f), cfg.p, lambdas,
                                           cfg.N), None
    if e == "egorov":
        rep = ex.egorov_search(_operator(cfg), _function(cfg.f), cfg.eps, cfg.J)
        return Certificate("egorov", rep.verdict,
                           {"operator": cfg.operator, "f": cfg.f, "eps": cfg.eps, "J": cfg.J},
                           rep.to_json(), bound="excluded measure <= eps"), None
    if e == "diverge":
        ns = cfg.n or list(range(1, 65))
        if cfg.kind == "continuous":
            return ex.divergence_demo_continuous(ns), None
        if cfg.kind == "sequence":
            return ex.divergence_demo_sequence(ns), None
        raise InputError(f"unknown divergence kind {cfg.kind!r}")
    if e == "nonsep-demo":
        ns = cfg.n or [4, 16, 64]
        xi = ex.harmonic(cfg.length) if cfg.length else None
        alpha = cfg.alpha
        if isinstance(alpha, dict):
            alpha = {int(k): float(v) for k, v in alpha.items()}
        tol = float(cfg.tol) if cfg.tol is not None else 1e-3
        return ex.nonseparable_demo(xi=xi, ns=ns, alpha=alpha, tol=tol), None
    if e == "met":
        if cfg.space is None:
            raise InputError("met needs a space")
        return _met_certificate(cfg.space), None
    if e == "decay":
        if cfg.space is None:
            raise InputError("decay needs a space")
        tol = as_fraction(cfg.tol) if cfg.tol is not None else Fraction(1, 100)
        cert = ex.mean_ergodic_decay(_operator(cfg), _function(cfg.f),
                                     space_from_json(cfg.space), cfg.n, tol)
        return cert, ex.decay_csv(cert)
    if e == "ds-check":
        return verify_ds(_operator(cfg)), None
    if e == "projection-identities":
        T = _operator(cfg)
        return ex.projection_identities(T, [_function(g, "fs") for g in cfg.fs or []]), None
    if e == "submajorization":
        return ex.submajorization_batch(seed, cfg.count or 1000), None
    if e == "projection-batch":
        return ex.projection_batch(seed, cfg.count or 50), None
    raise InputError(f"unknown experiment {e!r}")


# -- output -----------------------------------------------------------------------

def _emit(certs: list[Certificate], csvs: list[tuple[str, str]], out: str | None) -> int:
    for c in certs:
        print(c.to_line())
    if out:
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        _atomic_write(d / "certificates.jsonl", "".join(c.to_line() + "\n" for c in certs))
        for name, text in csvs:
            _atomic_write(d / name, text)
    return EXIT[combine_verdicts(c.verdict for c in certs)]


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    tmp.replace(path)


def _print_json(obj) -> None:
    print(canonical_dumps(obj))


def _decimal(x) -> str:
    if isinstance(x, Fraction):
        return f"{float(x):.12g}"
    return f"{x:.12g}"


# -- subcommands ----------------------------------------------------------------------

def cmd_rearrange(a) -> int:
    _print_json(to_json(rearrangement(_function(_parse_json(a.f, "--f")))))
    return 0


def cmd_norm(a) -> int:
    X = space_from_json(_parse_json(a.space, "--space"))
    v = norm(X, _function(_parse_json(a.f, "--f")))
    exact = isinstance(v, Fraction)
    if a.json:
        _print_json({"value": v, "exact": exact, "decimal": _decimal(v)})
    else:
        print(str(v) if exact else _decimal(v))
        if exact and v.denominator != 1:
            print(f"~ {_decimal(v)}", file=sys.stderr)
    return 0


def cmd_average(a) -> int:
    T = operator_from_json(_parse_json(a.op, "--op"))
    _print_json(to_json(cesaro_average(T, _function(_parse_json(a.f, "--f")), a.n)))
    return 0


def cmd_maximal(a) -> int:
    T = operator_from_json(_parse_json(a.op, "--op"))
    f = _function(_parse_json(a.f, "--f"))
    _print_json(to_json(maximal_function(T, f, a.N, absolute=not a.signed)))
    return 0


def _cfg_from_args(a, experiment: str, **kw) -> ExperimentConfig:
    cfg = ExperimentConfig(experiment=experiment, **kw)
    if getattr(a, "op", None):
        cfg.operator = _parse_json(a.op, "--op")
    if getattr(a, "f", None):
        cfg.f = _parse_json(a.f, "--f")
    if getattr(a, "space", None):
        cfg.space = _parse_json(a.space, "--space")
    if getattr(a, "tol", None) is not None:
        cfg.tol = a.tol
    return cfg


def _run_single(a, cfg: ExperimentConfig) -> int:
    cert, csv = run_job(cfg, resolve_seed(a.seed))
    if csv is not None and a.csv:
        sys.stdout.write(csv)
    return _emit([cert], [("decay.csv", csv)] if csv else [], a.out)


def cmd_ds_check(a) -> int:
    return _run_single(a, _cfg_from_args(a, "ds-check"))


def cmd_hopf(a) -> int:
    return _run_single(a, _cfg_from_args(a, "hopf", N=a.N, count=a.count))


def cmd_maxineq(a) -> int:
    lambdas = _frac_list(a.lambdas) if a.lambdas else None
    return _run_single(a, _cfg_from_args(a, "maxineq", N=a.N, p=a.p, count=a.count,
                                         lambdas=lambdas))


def cmd_egorov(a) -> int:
    return _run_single(a, _cfg_from_args(a, "egorov", eps=a.eps, J=a.J))


def cmd_diverge(a) -> int:
    cert, _ = run_job(ExperimentConfig("diverge", kind=a.kind, n=_int_list(a.n)), 0)
    key = "l1_plus_linf_of_average" if a.kind == "continuous" else "linf_difference"
    extra = cert.measured[key]
    for n, d in cert.measured["l1_difference"].items():
        _print_json({"kind": a.kind, "n": n, "l1_difference": d, key: extra[n]})
    if a.out:
        _emit_file(cert, a.out)
    return EXIT[cert.verdict]


def _emit_file(cert: Certificate, out: str) -> None:
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    _atomic_write(d / "certificates.jsonl", cert.to_line() + "\n")


def cmd_nonsep(a) -> int:
    alpha = None
    if a.alpha:
        alpha = _parse_json(a.alpha, "--alpha")
    return _run_single(a, _cfg_from_args(a, "nonsep-demo", n=_int_list(a.n), length=a.length,
                                         alpha=alpha))


def cmd_met(a) -> int:
    cert = _met_certificate(_parse_json(a.space, "--space"))
    _print_json(cert.measured)
    return EXIT[cert.verdict]


def cmd_decay(a) -> int:
    ns = _int_list(a.n) if a.n else None
    return _run_single(a, _cfg_from_args(a, "decay", n=ns))


def cmd_suite(a) -> int:
    cfg = _parse_json(Path(a.config).read_text(), a.config)
    if not isinstance(cfg, dict) or "jobs" not in cfg:
        raise InputError("suite config needs a 'jobs' list")
    unknown = set(cfg) - {"jobs", "seed"}
    if unknown:
        raise InputError(f"unknown suite fields: {sorted(unknown)}")
    seed = a.seed if a.seed is not None else cfg.get("seed")
    seed = resolve_seed(seed)
    jobs = []
    for k, obj in enumerate(cfg["jobs"]):
        job = ExperimentConfig.from_json(obj)
        job.id = job.id or f"job{k:03d}"
        jobs.append(job)
    ids = [j.id for j in jobs]
    if len(set(ids)) != len(ids):
        raise InputError("job ids must be unique")
    with ThreadPoolExecutor(max_workers=max(1, a.jobs)) as pool:
        results = list(pool.map(lambda j: run_job(j, seed), jobs))
    order = sorted(range(len(jobs)), key=lambda i: jobs[i].id)
    certs, csvs = [], []
    for i in order:
        cert, csv = results[i]
        cert.inputs = dict(cert.inputs, job_id=jobs[i].id)
        certs.append(cert)
        if csv is not None:
            csvs.append((f"decay_{jobs[i].id}.csv", csv))
    return _emit(certs, csvs, a.out)


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="random seed (falls back to ERGODIC_LAB_SEED, then 0)")
    common.add_argument("--out", default=None, help="directory for JSONL/CSV artifacts")
    common.add_argument("--tol", default=None, help="tolerance (decimal or p/q)")

    parser = _Parser(prog="ergodic-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    p = add("rearrange", cmd_rearrange, "non-increasing rearrangement f*")
    p.add_argument("--f", required=True)
    p = add("norm", cmd_norm, "norm of f in a symmetric space")
    p.add_argument("--space", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--json", action="store_true")
    p = add("ds-check", cmd_ds_check, "verify the Dunford-Schwartz property")
    p.add_argument("--op", required=True)
    p = add("average", cmd_average, "Cesaro average M_n(T) f")
    p.add_argument("--op", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--n", type=int, required=True)
    p = add("maximal", cmd_maximal, "truncated maximal function")
    p.add_argument("--op", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--signed", action="store_true", help="max of M_n f without absolute value")
    p = add("hopf", cmd_hopf, "Hopf maximal ergodic inequality")
    p.add_argument("--op")
    p.add_argument("--f")
    p.add_argument("--N", type=int, default=64)
    p.add_argument("--count", type=int, default=None, help="random kernels when --op is absent")
    p = add("maxineq", cmd_maxineq, "weak-type maximal inequality")
    p.add_argument("--op")
    p.add_argument("--f")
    p.add_argument("--p", type=int, default=1, choices=(1, 2))
    p.add_argument("--lambdas", default=None, help="comma-separated rational thresholds")
    p.add_argument("--N", type=int, default=64)
    p.add_argument("--count", type=int, default=None)
    p = add("egorov", cmd_egorov, "almost-uniform convergence search")
    p.add_argument("--op", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--eps", default="1/8")
    p.add_argument("--J", type=int, default=10)
    p = add("diverge", cmd_diverge, "L1 divergence counterexamples")
    p.add_argument("--kind", choices=("continuous", "sequence"), required=True)
    p.add_argument("--n", default=",".join(str(k) for k in range(1, 65)))
    p = add("nonsep-demo", cmd_nonsep, "non-convergence in a Marcinkiewicz space")
    p.add_argument("--n", default="4,16,64")
    p.add_argument("--length", type=int, default=None, help="support length of xi_k = 1/k")
    p.add_argument("--alpha", default=None, help="lower bound: number or JSON map n -> value")
    p = add("met", cmd_met, "mean ergodic predicate of a space")
    p.add_argument("--space", required=True)
    p = add("decay", cmd_decay, "mean ergodic decay table")
    p.add_argument("--op", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--n", default=None, help="comma-separated schedule (default 1,2,...,1024)")
    p.add_argument("--csv", action="store_true", help="also print the n,d_n table")
    p = add("suite", cmd_suite, "run a batch of experiments from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--jobs", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        return a.fn(a)
    except PreconditionError as e:
        print(f"precondition violated: {e}", file=sys.stderr)
    except (InputError, DomainError, ValueError, KeyError, TypeError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
