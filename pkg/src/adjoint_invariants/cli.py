"""Command-line entry point: ``adjinv`` (or ``python -m adjoint_invariants``).

Exit codes: 0 when every check agrees, 1 when a verification finds a
disagreement or a nonzero defect, 2 for configuration and budget errors.
"""

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass

from . import __version__, modular
from .classical_lie import BASIS_CONVENTION, AlgebraSpec, build_algebra, killing_ratio
from .errors import AdjointInvariantsError, BudgetExceeded
from .invariant_space import MEMBERSHIP_BUDGET, RANK_BUDGET, verify_theorem
from .tensor_core import DEFAULT_ENTRY_BUDGET, entry_count

DIMS_HEADER = ["family", "rank", "degree", "kernel_dim", "span_rank", "generator_count"]


class ConfigError(AdjointInvariantsError):
    pass


@dataclass
class RunConfig:
    specs: list
    degree_min: int = 1
    degree_max: int = 3
    primes: tuple = ()
    budget_entries: int = MEMBERSHIP_BUDGET
    include_epsilon: bool = True
    fmt: str = "json"
    out: str = None
    timings: bool = False

    def __post_init__(self):
        if self.degree_min < 1 or self.degree_min > self.degree_max:
            raise ConfigError(f"empty degree range {self.degree_min}..{self.degree_max}")
        if self.budget_entries <= 0:
            raise ConfigError("--budget-entries must be positive")

    @property
    def degrees(self):
        return range(self.degree_min, self.degree_max + 1)

    def to_dict(self, command):
        return {
            "command": command,
            "algebras": [s.label for s in self.specs],
            "degree_min": self.degree_min,
            "degree_max": self.degree_max,
            "primes": list(self.primes),
            "budget_entries": self.budget_entries,
            "include_epsilon_chains": self.include_epsilon,
            "basis_convention": BASIS_CONVENTION,
        }


# argument handling -------------------------------------------------------------

def _specs(args):
    specs = [AlgebraSpec.parse(label) for label in args.algebra or []]
    if args.family is not None or args.rank is not None:
        if args.family is None or args.rank is None:
            raise ConfigError("--family and --rank must be given together")
        specs.append(AlgebraSpec(args.family.upper(), args.rank))
    if not specs:
        raise ConfigError("no algebra given (use --family/--rank or --algebra)")
    return specs


def _primes(text):
    if text is None:
        return modular.default_primes()
    return modular.validate_primes(int(x) for x in text.split(",") if x.strip())


def _config(args):
    budget = args.budget_entries
    if budget is None:
        budget = DEFAULT_ENTRY_BUDGET if args.allow_long else MEMBERSHIP_BUDGET
    return RunConfig(
        specs=_specs(args),
        degree_min=args.degree_min,
        degree_max=args.degree_max,
        primes=_primes(args.primes),
        budget_entries=budget,
        include_epsilon=not args.no_epsilon_chains,
        fmt=args.format,
        out=args.out,
        timings=args.timings,
    )


def _common(p, fmt_default="json"):
    p.add_argument("--family", choices=list("ABCDabcd"))
    p.add_argument("--rank", type=int)
    p.add_argument("--algebra", action="append", metavar="LABEL",
                   help="algebra label such as A_2 or D3 (repeatable)")
    p.add_argument("--degree-min", type=int, default=1)
    p.add_argument("--degree-max", type=int, default=3)
    p.add_argument("--primes", help=f"comma-separated primes (default: ${modular.PRIMES_ENV_VAR} "
                                    f"or {','.join(map(str, modular.DEFAULT_PRIMES))})")
    p.add_argument("--budget-entries", type=int,
                   help=f"largest tensor size allowed (default {MEMBERSHIP_BUDGET})")
    p.add_argument("--allow-long", action="store_true",
                   help=f"raise the default budget to {DEFAULT_ENTRY_BUDGET} entries")
    p.add_argument("--no-epsilon-chains", action="store_true",
                   help="leave the D_r epsilon chains out of the generating set")
    p.add_argument("--format", choices=["json", "csv", "text"], default=fmt_default)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--timings", action="store_true",
                   help="include wall-clock timings (reports are then not reproducible)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="adjinv", description="Adjoint-invariant tensors of classical Lie algebras.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="group", required=True)

    p = sub.add_parser("algebra", help="basic data of one algebra")
    p.add_argument("action", choices=["info"])
    _common(p, fmt_default="text")

    p = sub.add_parser("verify", help="check the generating set or the identities")
    p.add_argument("action", choices=["theorem", "identities"])
    _common(p)

    p = sub.add_parser("table", help="tabulate invariant dimensions")
    p.add_argument("action", choices=["dims"])
    _common(p, fmt_default="csv")
    return parser


# commands ----------------------------------------------------------------------

def cmd_algebra_info(cfg):
    rows = []
    for spec in cfg.specs:
        alg = build_algebra(spec)
        rows.append({
            "family": spec.family,
            "rank": spec.rank,
            "dim_v": alg.dim_v,
            "dim_g": alg.dim_g,
            "exponents": alg.exponents,
            "killing_ratio": str(killing_ratio(alg)),
        })
    return rows, 0


def _theorem_reports(cfg):
    # refuse the whole run before doing any work
    for spec in cfg.specs:
        entries = entry_count(spec.dim_g, cfg.degree_max)
        if entries > cfg.budget_entries:
            raise BudgetExceeded(f"{spec} degree {cfg.degree_max}", entries, cfg.budget_entries)
    reports = []
    for spec in cfg.specs:
        alg = build_algebra(spec)
        for k in cfg.degrees:
            reports.append(verify_theorem(
                alg, k, cfg.primes, include_epsilon=cfg.include_epsilon,
                membership_budget=cfg.budget_entries,
                rank_budget=max(cfg.budget_entries, RANK_BUDGET)))
    return reports


def cmd_verify_theorem(cfg):
    reports = _theorem_reports(cfg)
    code = 0 if all(r.agreement for r in reports) else 1
    return [r.to_dict(timings=cfg.timings) for r in reports], code


def identity_checks(alg):
    from . import identities as ids

    checks = [ids.structure_constants_from_traces, ids.check_trace_decomposition,
              ids.check_jacobi_as_traces, ids.check_chevalley_degrees]
    if alg.form is not None:
        checks = [ids.check_form_swap, ids.check_form_contraction] + checks
    if alg.family == "D":
        checks += [ids.check_pfaffian_correspondence, ids.check_outer_automorphism]
    return checks


def cmd_verify_identities(cfg):
    from . import identities as ids

    results = [ids.check_epsilon_delta(n) for n in (2, 3, 4)]
    for spec in cfg.specs:
        alg = build_algebra(spec)
        for check in identity_checks(alg):
            t0 = time.perf_counter()
            res = check(alg)
            if cfg.timings:
                res.detail["seconds"] = round(time.perf_counter() - t0, 3)
            results.append(res)
    code = 0 if all(r.passed for r in results) else 1
    return [r.to_dict() for r in results], code


def cmd_dimension_table(cfg):
    reports = _theorem_reports(cfg)
    rows = [{k: r.to_dict()[k] for k in DIMS_HEADER} for r in reports]
    code = 0 if all(r.agreement for r in reports) else 1
    return rows, code


COMMANDS = {
    ("algebra", "info"): cmd_algebra_info,
    ("verify", "theorem"): cmd_verify_theorem,
    ("verify", "identities"): cmd_verify_identities,
    ("table", "dims"): cmd_dimension_table,
}


# rendering ----------------------------------------------------------------------

def render(results, cfg, command):
    if cfg.fmt == "json":
        doc = {"tool_version": __version__, "config": cfg.to_dict(command), "results": results}
        return json.dumps(doc, indent=2) + "\n"
    if cfg.fmt == "csv":
        buf = io.StringIO()
        if command in ("verify theorem", "table dims"):
            header = DIMS_HEADER
        else:
            header = [k for k in results[0] if not isinstance(results[0][k], (dict, list))]
        writer = csv.DictWriter(buf, fieldnames=header, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        writer.writerows(results)
        return buf.getvalue()
    lines = []
    for row in results:
        lines.append("  ".join(f"{k}={_text(v)}" for k, v in row.items() if k != "detail"))
    return "\n".join(lines) + "\n"


def _text(v):
    if isinstance(v, list):
        return "[" + ",".join(str(x) for x in v) + "]"
    return str(v)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    command = f"{args.group} {args.action}"
    try:
        cfg = _config(args)
        results, code = COMMANDS[(args.group, args.action)](cfg)
    except (AdjointInvariantsError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = render(results, cfg, command)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
