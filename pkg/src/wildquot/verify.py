"""Scenario orchestration and reports.

A scenario runs the whole pipeline (group, smallness, invariants, relation,
comparison with the published display, blow-up tower, ledger) for a number
of specialisations of the parameters a, b and checks that the verdicts
agree.  Specialisations are independent, so they can run in worker
processes; results are merged in specialisation order, which keeps the
structured report byte-for-byte reproducible.
"""

from __future__ import annotations

import json
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .errors import WildQuotError
from .ff import make_field, sample_parameter

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CASES = ("b0", "bne0")
STRICTNESS = ("report_typos", "fail_on_mismatch")

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_ERROR = 3
EXIT_FLAGS = 4

EXPECTED_VERDICT = {
    "b0": "not log canonical: E4 coefficient -3",
    "bne0": "not log canonical: E2 coefficient -2",
}
NOT_SMALL = "NotSmall"


@dataclass
class RunConfig:
    p: int = 3
    extension_degree: int = 4
    seeds: list = field(default_factory=lambda: [0])
    num_specializations: int = 20
    generator_cap: int = 12
    relation_cap: int = 20
    groebner_budget: int | None = None
    case: str = "both"
    strictness: str = "report_typos"
    force_a: int | None = None  # field code; skips sampling of a
    force_b: int | None = None
    rank_trials: int = 5
    workers: int = 1
    lemma_q: int = 3
    lemma_extended: bool = False  # also run the order-9 census in F_9's Sylow subgroup
    enumeration_budget: int = 3 ** 9

    def validate(self):
        if self.p != 3:
            raise ValueError("only characteristic 3 is supported")
        if self.extension_degree < 1:
            raise ValueError("extension_degree must be >= 1")
        if self.num_specializations < 1:
            raise ValueError("num_specializations must be >= 1")
        if self.generator_cap < 1 or self.relation_cap < 1:
            raise ValueError("degree caps must be >= 1")
        if self.case not in CASES + ("both",):
            raise ValueError(f"case must be b0, bne0 or both, not {self.case!r}")
        if self.strictness not in STRICTNESS:
            raise ValueError(f"strictness must be one of {STRICTNESS}")
        if not self.seeds:
            raise ValueError("need at least one seed")
        return self

    def cases(self) -> list:
        return list(CASES) if self.case == "both" else [self.case]

    def schedule(self) -> list:
        """(index, rng seed) for every specialisation, in report order."""
        out = []
        for s in self.seeds:
            for j in range(self.num_specializations):
                out.append((len(out), s * 100_000 + j))
        return out

    def as_dict(self) -> dict:
        return asdict(self)


# -- configuration parsing (key=value files and overrides) -------------------

_INT_KEYS = {"p", "extension_degree", "num_specializations", "generator_cap", "relation_cap",
             "groebner_budget", "force_a", "force_b", "rank_trials", "workers", "lemma_q",
             "enumeration_budget"}
_BOOL_KEYS = {"lemma_extended"}


def _coerce(key: str, raw: str):
    raw = raw.strip()
    if key == "seeds":
        return [int(s) for s in raw.replace(" ", "").split(",") if s]
    if key in _INT_KEYS:
        return None if raw.lower() in ("", "none") else int(raw)
    if key in _BOOL_KEYS:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{key}: expected a boolean, got {raw!r}")
    return raw


def parse_config_text(text: str) -> dict:
    """key=value lines; '#' starts a comment; unknown keys are an error."""
    known = set(RunConfig.__dataclass_fields__)
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {n}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ValueError(f"config line {n}: unknown key {key!r}")
        out[key] = _coerce(key, val)
    return out


def make_config(file_text: str | None = None, **overrides) -> RunConfig:
    values = parse_config_text(file_text) if file_text else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values).validate()


# -- one specialisation ----------------------------------------------------

def specialization(config: RunConfig, case: str, rng_seed: int):
    F = make_field(config.p, config.extension_degree)
    if config.force_a is not None:
        a = F.element(config.force_a % F.q)
    elif F.k > 1:
        # without replacement within one base seed, so 20 runs see 20 different a
        base, j = divmod(rng_seed, 100_000)
        codes = list(range(F.p, F.q))
        random.Random(base).shuffle(codes)
        a = F.element(codes[j % len(codes)])
    else:
        a = sample_parameter(F, "unconstrained", rng_seed)
    if case == "b0":
        b = F.zero()
    elif config.force_b is not None:
        b = F.element(config.force_b % F.q)
    else:
        b = sample_parameter(F, "nonzero", rng_seed + 50_000)
    return F, a, b


def ledger_verdict(final: dict) -> str:
    if not final:
        return "log canonical: empty ledger"
    name, c = min(sorted(final.items()), key=lambda kv: kv[1])
    if c < -1:
        return f"not log canonical: {name} coefficient {c}"
    return f"log canonical: minimal coefficient {c}"


def _tower_summary(t) -> dict:
    d = t.as_dict()
    d["singular_loci_verified"] = all(v["equal"] for v in t.loci.values())
    d["displays_verified"] = all(v["equal_up_to_unit"] for v in t.displays.values())
    d["overlaps_consistent"] = all(o["agree_up_to_unit"] for o in t.overlaps)
    d["exclusions_verified"] = all(v["X_misses_uncovered_part"] for v in t.exclusions.values())
    d["compositions_verified"] = all(t.compositions.values())
    return d


def run_specialization(config: RunConfig, case: str, index: int, rng_seed: int) -> dict:
    """The full pipeline for one parameter choice; errors are captured."""
    from .groups import build_group, is_small
    from .invariants import (compare_with_paper, fit_relation, generic_rank_check,
                             minimal_generators, display_normalized_relation,
                             substitute_generators)
    from .towers import run_tower

    F, a, b = specialization(config, case, rng_seed)
    alpha = a ** 3 - a
    rec = {"index": index, "seed": rng_seed, "case": case,
           "a": F.render_code(a.code), "b": F.render_code(b.code),
           "alpha": F.render_code(alpha.code), "stages": []}
    try:
        G = build_group(a, b)
        small, witness = is_small(G)
        rec["group_order"] = G.order
        rec["small"] = small
        rec["stages"].append("smallness")
        # the gate asks for a small C_3^2: a collapsed U (order 3) does not qualify
        rec["degenerate"] = G.degenerate
        rec["gate"] = small and not G.degenerate
        if not rec["gate"]:
            if witness is not None:
                rec["pseudo_reflection"] = repr(witness)
            rec["verdict"] = NOT_SMALL
            return rec
        gs = minimal_generators(G, config.generator_cap)
        rec["generator_degrees"] = gs.degrees
        rec["generators"] = {g.name: str(g.poly) for g in gs.gens}
        rec["stages"].append("generators")
        fit = fit_relation(gs, config.relation_cap)
        rec["relation"] = str(fit.relation)
        rec["relation_weighted_degree"] = fit.weighted_degree
        rec["relation_kernel_dim"] = fit.kernel_dim
        rec["relation_vanishes"] = substitute_generators(fit.relation, gs).is_zero()
        rec["generic_rank"] = generic_rank_check(gs, config.rank_trials, rng_seed)
        rec["stages"].append("relation")
        cmp = compare_with_paper(fit.relation, case, a, b)
        rec["display_diff"] = cmp.as_dict()
        rec["display_flags"] = [f"{m}: {flag}" for m, flag in cmp.flags]
        rec["unflagged_terms_match"] = cmp.unflagged_all_matched
        rec["stages"].append("display_diff")
        rel = display_normalized_relation(fit.relation, case, a, b)
        tower = run_tower(rel, case, {"a": a, "b": b, "alpha": alpha}, config.groebner_budget)
        rec["tower"] = _tower_summary(tower)
        rec["final_ledger"] = tower.final_ledger
        rec["stages"].append("tower")
        rec["verdict"] = ledger_verdict(tower.final_ledger)
    except WildQuotError as exc:
        rec["error"] = {"type": type(exc).__name__, "message": str(exc)}
        rec["verdict"] = "error"
    return rec


def _expected(case: str, rec: dict) -> str:
    # a in F_3 makes the group not small (or degenerate): nothing downstream applies
    if rec.get("gate") is False:
        return NOT_SMALL
    return EXPECTED_VERDICT[case]


def _job(args):
    config, case, index, seed = args
    return run_specialization(config, case, index, seed)


def run_scenario(config: RunConfig, case: str | None = None) -> dict:
    """Run every specialisation of one case and aggregate the verdicts."""
    case = case or config.case
    if case not in CASES:
        raise ValueError(f"run_scenario needs a single case, got {case!r}")
    jobs = [(config, case, i, s) for i, s in config.schedule()]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            recs = list(pool.map(_job, jobs))
    else:
        recs = [_job(j) for j in jobs]
    recs.sort(key=lambda r: r["index"])
    verdicts = sorted({r["verdict"] for r in recs})
    errors = [r for r in recs if "error" in r]
    unanimous = len(verdicts) == 1
    verdict = verdicts[0] if unanimous else "disagreement: " + "; ".join(verdicts)
    expected = sorted({_expected(case, r) for r in recs})
    matches = unanimous and not errors and expected == [verdict]
    ledgers = sorted({json.dumps(r.get("final_ledger"), sort_keys=True) for r in recs if "final_ledger" in r})
    mults = sorted({json.dumps(r["tower"]["multiplicities"]) for r in recs if "tower" in r})
    flags = sorted({f for r in recs for f in r.get("display_flags", [])})
    return {
        "case": case,
        "specializations": recs,
        "verdict": verdict,
        "expected_verdict": expected[0] if len(expected) == 1 else expected,
        "unanimous": unanimous,
        "matches_expected": matches,
        "errors": [{"index": r["index"], **r["error"]} for r in errors],
        "final_ledger": json.loads(ledgers[0]) if len(ledgers) == 1 else None,
        "multiplicities": json.loads(mults[0]) if len(mults) == 1 else None,
        "display_flags": flags,
    }


# -- the two group-theoretic lemmas ------------------------------------------

def run_lemmas(config: RunConfig) -> dict:
    from .groups import (centralizer_bruteforce, lemma_matrix, span_form_set,
                         verify_small_3group_structure)

    if config.p != 3:
        raise ValueError("the lemmas are about characteristic 3")
    k = {3: 1, 9: 2, 27: 3}.get(config.lemma_q)
    if k is None:
        raise ValueError(f"lemma_q must be 3, 9 or 27, not {config.lemma_q}")
    F = make_field(3, k)
    R = lemma_matrix(F)
    C = centralizer_bruteforce(R, budget=config.enumeration_budget)
    S = span_form_set(R)
    from .groups import MatrixGroup
    centralizer = {
        "q": F.q,
        "R": repr(R),
        "centralizer_order": len(C),
        "span_form_order": len(S),
        "equal": C == S,
        "abelian": MatrixGroup(C, (), field=F).is_abelian(),
        "witnesses": [repr(m) for m in sorted(C)][:3],
    }
    centralizer["holds"] = centralizer["equal"] and centralizer["abelian"]
    census = verify_small_3group_structure(config.lemma_q, 2, "sl3", config.workers,
                                           config.enumeration_budget)
    order9 = census.as_dict()
    order9["vacuous"] = census.small == 0
    order9["holds"] = census.all_small_elementary_abelian
    out = {"centralizer": centralizer, "order9_subgroups": order9}
    if config.lemma_extended:
        ext = verify_small_3group_structure(9, 2, "unitriangular", config.workers)
        d = ext.as_dict()
        d["vacuous"] = ext.small == 0
        d["holds"] = ext.all_small_elementary_abelian
        out["order9_unitriangular_F9"] = d
    return out


# -- reports ----------------------------------------------------------------

def build_report(config: RunConfig, scenarios: list, lemmas: dict | None = None) -> dict:
    claims = {}
    for sc in scenarios:
        claims[f"{sc['case']}_not_log_canonical"] = sc["matches_expected"]
    if lemmas:
        for name, d in sorted(lemmas.items()):
            claims[name] = d["holds"]
    return {
        "schema_version": SCHEMA_VERSION,
        "config": config.as_dict(),
        "scenarios": scenarios,
        "lemmas": lemmas or {},
        "claims": claims,
        "exit_code": exit_code(config, scenarios, lemmas),
    }


def exit_code(config: RunConfig, scenarios: list, lemmas: dict | None = None) -> int:
    if any(sc["errors"] for sc in scenarios):
        return EXIT_ERROR
    if not all(sc["matches_expected"] for sc in scenarios):
        return EXIT_MISMATCH
    if lemmas and not all(d["holds"] for d in lemmas.values()):
        return EXIT_MISMATCH
    if config.strictness == "fail_on_mismatch" and any(sc["display_flags"] for sc in scenarios):
        return EXIT_FLAGS
    return EXIT_OK


def empty_report(config: RunConfig | None = None) -> dict:
    return build_report(config or RunConfig(), [], None)


def emit_report(report: dict, format: str = "structured") -> bytes:
    if format == "structured":
        # one line, sorted keys: stable across runs and platforms
        return (json.dumps(report, sort_keys=True, ensure_ascii=True) + "\n").encode("ascii")
    if format == "human_text":
        return human_text(report).encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")


def human_text(report: dict) -> str:
    out = [f"report schema {report['schema_version']}"]
    for sc in report["scenarios"]:
        out.append("")
        out.append(f"== case {sc['case']} ==")
        recs = sc["specializations"]
        out.append(f"specializations: {len(recs)}, unanimous: {sc['unanimous']}")
        first = next((r for r in recs if "tower" in r), None)
        if first is not None:
            out.append(f"generator degrees: {first['generator_degrees']}")
            out.append(f"relation weighted degree: {first['relation_weighted_degree']}")
            t = first["tower"]
            out.append(f"multiplicities {t['multiplicities']}")
            out.append("step | center codim | multiplicity | K coefficient | pullback")
            for s in t["steps"]:
                pb = t["pullbacks"][s["index"] - 1]
                pbs = ", ".join(f"{o} -> {v}" for o, v in pb.items()) or "-"
                out.append(f"{s['index']:>4} | {s['center_codim']:>12} | {s['multiplicity']:>12} | "
                           f"{s['k_coefficient']:>13} | {pbs}")
            out.extend("  " + ln for ln in t["ledger"]["lines"])
            loci = "yes" if t["singular_loci_verified"] else "NO"
            out.append(f"singular loci verified: {loci}")
        if sc["display_flags"]:
            out.append("flagged display terms:")
            out.extend("  " + f for f in sc["display_flags"])
        for e in sc["errors"]:
            out.append(f"error in specialization {e['index']}: {e['type']}: {e['message']}")
        out.append(f"final ledger: {sc['final_ledger']}")
        out.append(f"verdict: {sc['verdict']}")
        out.append(f"expected: {sc['expected_verdict']}  ->  {'match' if sc['matches_expected'] else 'MISMATCH'}")
    for name, d in sorted(report.get("lemmas", {}).items()):
        out.append("")
        out.append(f"== {name} ==")
        for k in sorted(d):
            if k not in ("witnesses", "small_examples", "not_small_witnesses"):
                out.append(f"{k}: {d[k]}")
    out.append("")
    out.append(f"exit code {report['exit_code']}")
    return "\n".join(out) + "\n"
