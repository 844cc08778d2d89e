"""Command line: atlas, classify, truncate and verify."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import BudgetExceeded, InsufficientPrecision, InvalidCartanData, LoopStrataError, ParseError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET, EXIT_PRECISION = 0, 1, 2, 3, 4

SUITES = ("thm11", "thm13", "thm14", "cor15", "lemma-he", "fundamental", "matrix-oracle", "all")


@dataclass(frozen=True)
class RunConfig:
    group: str
    mu: tuple | None
    precision: int
    q: int
    ext: int
    budget: int
    seed: int
    jobs: int
    dot: bool
    oracle: bool
    out: str | None

    def __post_init__(self):
        if self.budget <= 0 or self.jobs <= 0:
            raise ValueError("budgets and --jobs must be positive")


def _config(args):
    from .affine import default_budget

    return RunConfig(group=args.group, mu=args.mu, precision=args.precision, q=args.q, ext=args.ext,
                     budget=args.budget if args.budget is not None else default_budget(), seed=args.seed,
                     jobs=args.jobs, dot=args.dot, oracle=args.oracle, out=args.out)


def _datum_and_mu(cfg, need_mu=True):
    from .parsing import parse_group, parse_mu
    from .rootdatum import siegel_mu

    d = parse_group(cfg.group)
    if cfg.mu is not None:
        mu = parse_mu(cfg.mu, d)
    elif d.name.startswith("GSp:"):
        mu = siegel_mu(d)
    elif need_mu:
        raise ValueError(f"--mu is required for {d.name}")
    else:
        mu = None
    return d, mu


def _emit(cfg, text, suffix=""):
    if cfg.out:
        path = Path(cfg.out)
        if suffix:
            path = path.with_suffix(suffix)
        path.write_text(text)
    else:
        sys.stdout.write(text)


def _generic_worker(job):
    from .alcoves import TruncationType
    from .atlas import generic_class
    from .parsing import parse_group
    from .rootdatum import WeylElt

    group, w, mu, budget = job
    d = parse_group(group)
    try:
        return generic_class(WeylElt(d, w), mu, budget)
    except BudgetExceeded as exc:
        raise BudgetExceeded(f"stratum {TruncationType(WeylElt(d, w), mu)}: {exc}") from None


def cmd_atlas(cfg):
    from .atlas import closure_poset

    d, mu = _datum_and_mu(cfg)
    atlas = closure_poset(d, mu, cfg.budget, generic=False)
    jobs = [(cfg.group, t.w.idx, t.mu, cfg.budget) for t in atlas.strata]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            gens = list(pool.map(_generic_worker, jobs))
    else:
        gens = [_generic_worker(j) for j in jobs]
    atlas.generic = gens
    if cfg.out:
        _emit(cfg, atlas.dumps() + "\n")
        if cfg.dot:
            _emit(cfg, atlas.to_dot(), ".dot")
    else:
        _emit(cfg, atlas.to_dot() if cfg.dot else atlas.dumps() + "\n")
    return EXIT_OK


def classify_report(x):
    from .alcoves import fundamental_parabolics, standard_rep, truncation_type_affine
    from .isocrystal import class_of

    d = x.datum
    cls = class_of(x)
    t = truncation_type_affine(x)
    flags = [{"levi": sorted(P.levi.roots), "N": sorted(P.N)} for P in fundamental_parabolics(x)]
    return {"element": repr(x), "class": cls.to_json(d), "truncation_type": t.to_json(),
            "minimal_element": repr(standard_rep(d, cls)), "fundamental_for": flags}


def cmd_classify(cfg, element):
    from .parsing import parse_element, parse_group

    d = parse_group(cfg.group)
    x = parse_element(element, d)
    _emit(cfg, json.dumps(classify_report(x), indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_truncate(cfg, path):
    from .matrix_truncation import brute_force_truncation_oracle, truncation_type_matrix
    from .parsing import parse_matrix

    g = parse_matrix(Path(path).read_text())
    t, tr = truncation_type_matrix(g, with_transcript=True)
    report = {"type": t.to_json(), "steps": len(tr.steps),
              "deltas": [repr(s.delta) for s in tr.steps]}
    if cfg.oracle:
        o = brute_force_truncation_oracle(g, seed=cfg.seed)
        report["oracle"] = o.to_json()
        report["oracle_agrees"] = o == t
    _emit(cfg, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if report.get("oracle_agrees", True) else EXIT_FAIL


def run_suite(name, cfg):
    from . import suites

    d, mu = _datum_and_mu(cfg, need_mu=name not in ("lemma-he", "fundamental", "matrix-oracle"))
    if name == "thm11":
        return suites.suite_types_well_defined(d, mu, q=cfg.q, m=cfg.ext, precision=cfg.precision, seed=cfg.seed)
    if name == "thm13":
        return suites.suite_closure_order(d, mu, cfg.budget)
    if name == "thm14":
        return suites.suite_generic_bounds(d, mu, cfg.budget)
    if name == "cor15":
        return suites.suite_generic_minimal(d, mu, cfg.budget)
    if name == "lemma-he":
        return suites.suite_lemma_he(d, max_len=4)
    if name == "fundamental":
        return suites.suite_fundamental(d, max_height=min(d.rank, 5), q=cfg.q, m=cfg.ext, mu_bound=mu)
    if name == "matrix-oracle":
        if not d.name.startswith("GL:"):
            raise ValueError("the matrix oracle needs a GL group")
        mu = mu if mu is not None else (1,) + (0,) * (d.rank - 1)
        return suites.suite_matrix_oracle(d.rank, mu, cfg.q, cfg.ext, _oracle_precision(mu, cfg))
    raise ValueError(f"unknown suite {name!r}")


def _oracle_precision(mu, cfg):
    from .matrix_truncation import required_precision

    return max(cfg.precision, required_precision(mu))


def _oracle_feasible(d, mu, cfg):
    mu = mu if mu is not None else (1,) + (0,) * (d.rank - 1)
    return (cfg.q ** cfg.ext) ** (_oracle_precision(mu, cfg) * d.rank ** 2) <= 1 << 22


def cmd_verify(cfg, suite):
    names = [s for s in SUITES if s != "all"] if suite == "all" else [suite]
    if suite == "all":
        d, mu = _datum_and_mu(cfg, need_mu=False)
        if mu is None:
            names = [s for s in names if s in ("lemma-he", "fundamental")]
        if not d.name.startswith("GL:") or not _oracle_feasible(d, mu, cfg):
            names = [s for s in names if s != "matrix-oracle"]
    reports = [run_suite(n, cfg) for n in names]
    out = {"suites": [r.to_json() for r in reports], "passed": all(r.passed for r in reports)}
    _emit(cfg, json.dumps(out, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if out["passed"] else EXIT_FAIL


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", default="GL:2", help="GL:n, SL:n, GSp:2g or a raw-datum JSON path")
    common.add_argument("--mu", default=None, help="comma-separated dominant coweight")
    common.add_argument("--q", type=int, default=2, help="prime of the base field")
    common.add_argument("--ext", type=int, default=1, help="degree m of F_{q^m}")
    common.add_argument("--precision", type=int, default=4)
    common.add_argument("--budget", type=int, default=None, help="enumeration budget (default LOOPSTRATA_BUDGET or 4096)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--dot", action="store_true")
    common.add_argument("--oracle", action="store_true")
    common.add_argument("--out", default=None)

    p = argparse.ArgumentParser(prog="loopstrata", description="Truncation strata of loop groups.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("atlas", parents=[common], help="strata, closure relation and generic classes")
    c = sub.add_parser("classify", parents=[common], help="invariants of an affine Weyl group element")
    c.add_argument("element")
    t = sub.add_parser("truncate", parents=[common], help="truncation type of a matrix file")
    t.add_argument("matrix_file")
    v = sub.add_parser("verify", parents=[common], help="run a property suite")
    v.add_argument("--suite", choices=SUITES, default="all")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "atlas":
            return cmd_atlas(cfg)
        if args.command == "classify":
            return cmd_classify(cfg, args.element)
        if args.command == "truncate":
            return cmd_truncate(cfg, args.matrix_file)
        return cmd_verify(cfg, args.suite)
    except InsufficientPrecision as exc:
        print(f"error: InsufficientPrecision: {exc} (required precision {exc.required})", file=sys.stderr)
        return EXIT_PRECISION
    except BudgetExceeded as exc:
        print(f"error: BudgetExceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, InvalidCartanData, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LoopStrataError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
