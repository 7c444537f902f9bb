"""Command-line front end.

Exit codes: 0 every verdict matches, 2 verdict mismatch, 3 hard error
(including bad usage), 4 flagged display terms under fail_on_mismatch.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import verify
from .errors import WildQuotError

log = logging.getLogger("wildquot")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which would read as a verdict mismatch
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(verify.EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _add_run_options(p):
    p.add_argument("--config", metavar="FILE", help="key=value configuration file")
    p.add_argument("--seeds", help="comma-separated base seeds")
    p.add_argument("--num-specializations", type=int)
    p.add_argument("--extension-degree", type=int)
    p.add_argument("--generator-cap", type=int)
    p.add_argument("--relation-cap", type=int)
    p.add_argument("--groebner-budget", type=int,
                   help="S-pair budget (default from WILDQUOT_GROEBNER_BUDGET)")
    p.add_argument("--strictness", choices=verify.STRICTNESS)
    p.add_argument("--force-a", type=int, metavar="CODE", help="fix a to this field-element code")
    p.add_argument("--force-b", type=int, metavar="CODE")
    p.add_argument("--workers", type=int)


def _add_output_options(p, default_format="human_text"):
    p.add_argument("--format", choices=("structured", "human_text"), default=default_format)
    p.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="wildquot", description="Verify the wild C_3^2 quotient computations.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="run the b=0 / b!=0 scenarios")
    p.add_argument("case", choices=("b0", "bne0", "both"))
    p.add_argument("--with-lemmas", action="store_true", help="also run the group lemmas")
    _add_run_options(p)
    _add_output_options(p)

    p = sub.add_parser("lemmas", help="brute-force checks of the group lemmas")
    p.add_argument("--q", type=int, dest="lemma_q", help="field size (3, 9 or 27)")
    p.add_argument("--extended", action="store_true", dest="lemma_extended",
                   help="also census order-9 subgroups of the F_9 unitriangular group")
    p.add_argument("--enumeration-budget", type=int)
    p.add_argument("--config", metavar="FILE")
    p.add_argument("--workers", type=int)
    _add_output_options(p)

    p = sub.add_parser("rst", help="age criterion for a diagonal cyclic group")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--exps", required=True, help="comma-separated exponents")

    p = sub.add_parser("invariants", help="generators and relation for one specialization")
    p.add_argument("--cap", type=int, default=12)
    p.add_argument("--case", choices=verify.CASES, default="b0")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--relation-cap", type=int, default=20)
    p.add_argument("--force-a", type=int, metavar="CODE")
    p.add_argument("--force-b", type=int, metavar="CODE")
    p.add_argument("--extension-degree", type=int, default=4)

    p = sub.add_parser("parse", help="parse polynomials and print them canonically")
    p.add_argument("--ring", required=True, help='comma-separated variables, e.g. "x1,x2,x3,x4"')
    p.add_argument("--expr", action="append", help="expression (repeatable); default: stdin lines")
    p.add_argument("--order", default="grevlex", choices=("lex", "grlex", "grevlex"))
    p.add_argument("--case", choices=verify.CASES, default="bne0",
                   help="specialization the constants a, b, alpha come from")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--extension-degree", type=int, default=4)
    return ap


def _config(args, keys) -> verify.RunConfig:
    text = None
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    over = {k: getattr(args, k, None) for k in keys}
    if over.get("seeds") is not None:
        over["seeds"] = [int(s) for s in over["seeds"].split(",") if s.strip()]
    for k in ("lemma_extended",):
        if over.get(k) is False:
            over[k] = None  # store_true default must not override the file
    return verify.make_config(text, **over)


def _write(args, data: bytes):
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()


_RUN_KEYS = ("seeds", "num_specializations", "extension_degree", "generator_cap", "relation_cap",
             "groebner_budget", "strictness", "force_a", "force_b", "workers")


def cmd_verify(args) -> int:
    cfg = _config(args, _RUN_KEYS + ("case",))
    scenarios = [verify.run_scenario(cfg, c) for c in cfg.cases()]
    lemmas = verify.run_lemmas(cfg) if args.with_lemmas else None
    report = verify.build_report(cfg, scenarios, lemmas)
    _write(args, verify.emit_report(report, args.format))
    return report["exit_code"]


def cmd_lemmas(args) -> int:
    cfg = _config(args, ("lemma_q", "lemma_extended", "enumeration_budget", "workers"))
    report = verify.build_report(cfg, [], verify.run_lemmas(cfg))
    _write(args, verify.emit_report(report, args.format))
    return report["exit_code"]


def cmd_rst(args) -> int:
    from .rst import AgeVector, age, classify_cyclic
    exps = tuple(int(s) for s in args.exps.split(",") if s.strip())
    g = AgeVector(args.order, exps)
    res = classify_cyclic(args.order, exps)
    print(f"age{g} = {age(g)}")
    for v, a in res.ages:
        print(f"  {v}: age {a}")
    if res.pseudo_reflections:
        print("pseudo-reflections: " + ", ".join(map(str, res.pseudo_reflections)))
    print(res.verdict)
    return 0


def cmd_invariants(args) -> int:
    from .groups import build_group
    from .invariants import fit_relation, minimal_generators
    cfg = verify.make_config(extension_degree=args.extension_degree, force_a=args.force_a,
                             force_b=args.force_b)
    F, a, b = verify.specialization(cfg, args.case, args.seed)
    print(f"a = {F.render_code(a.code)}, b = {F.render_code(b.code)}")
    gs = minimal_generators(build_group(a, b), args.cap)
    for g in gs.gens:
        print(f"{g.name} (degree {g.degree}) = {g.poly}")
    fit = fit_relation(gs, args.relation_cap)
    print(f"relation (weighted degree {fit.weighted_degree}):")
    print(fit.relation)
    return 0


def cmd_parse(args) -> int:
    from .parser import parse_poly
    from .poly import PolyRing
    cfg = verify.make_config(extension_degree=args.extension_degree)
    F, a, b = verify.specialization(cfg, args.case, args.seed)
    names = tuple(v.strip() for v in args.ring.split(",") if v.strip())
    ring = PolyRing(F, names, args.order)
    consts = {"a": a, "b": b, "alpha": a ** 3 - a}
    texts = args.expr if args.expr else [ln for ln in sys.stdin.read().splitlines() if ln.strip()]
    for t in texts:
        print(parse_poly(t, ring, consts))
    return 0


COMMANDS = {"verify": cmd_verify, "lemmas": cmd_lemmas, "rst": cmd_rst,
            "invariants": cmd_invariants, "parse": cmd_parse}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if args.verbose == 0:
        # degenerate groups and skipped centres are reported in the output already
        logging.getLogger("wildquot").setLevel(logging.ERROR)
    try:
        return COMMANDS[args.command](args)
    except SyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return verify.EXIT_ERROR
    except (WildQuotError, ValueError, KeyError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return verify.EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
