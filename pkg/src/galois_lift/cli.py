"""Command-line front end: ``galois-lift <subcommand> --input JSON``.

Every report is a JSON document with a top-level "schema_version", an echo
of the input, the computed "result" and a "verification" block listing each
post-condition that was re-checked.  Exit status: 0 success, 2 invalid input
(with a "violations" list), 3 internal defect (with the "residual").
"""

from __future__ import annotations

import argparse
import random
import sys

from . import cocycle, cohom, ledger, tame
from .errors import InternalDefect, PreconditionError
from .jsonio import (
    SCHEMA_VERSION,
    dumps,
    field_from_json,
    group_from_json,
    load_input,
    matrix_from_json,
    module_from_json,
    pair_from_json,
    pair_to_json,
)

COMMANDS = ("tame-lift", "type-of", "cohomology", "hom-vanish", "ledger", "big-check",
            "gl3-classify", "main-ledger", "cocycle-search", "validate")


def _check(verification: dict):
    """Refuse to report a result whose checks did not all pass."""
    failed = sorted(k for k, v in verification.items() if v is False)
    if failed:
        raise InternalDefect("post-condition re-check failed", residual={"failed": failed})
    return verification


def _pair_input(data):
    return pair_from_json(data["pair"] if isinstance(data, dict) and "pair" in data else data)


def _require_field_pair(p, what="pair"):
    if not p.ring.is_field:
        raise PreconditionError(f"{what} must be given over the residue field (m = 1)",
                                [{"kind": "schema", "where": what}])


# ---------------------------------------------------------------------------
# handlers: (data, args) -> (result, verification)

def cmd_tame_lift(data, args):
    p = _pair_input(data)
    _require_field_pair(p)
    m = args.precision if args.precision is not None else data.get("precision", 2)
    if args.verify_only:
        bad = tame.pair_validate(p)
        if bad:
            raise PreconditionError("invalid tame pair", bad)
        return {"precision": m}, {"input_valid": True}
    lifted, C = tame.lift_tame(p, m)
    t_in, _ = tame.type_of(p)
    red = lifted.reduce()
    t_out, _ = tame.type_of(red)
    verification = _check({
        "relation_exact": lifted.relation_defect().is_zero(),
        "reduction_matches": red == p.conjugate(C),
        "type_preserved": t_in == t_out,
        "tau_standard": lifted.tau == tame.standard_tau(t_in, lifted.ring),
    })
    result = {
        "precision": m,
        "modulus": p.ell ** m,
        "lifted": pair_to_json(lifted),
        "conjugator": C.to_json(),
        "type": t_in.to_json(),
    }
    return result, verification


def cmd_type_of(data, args):
    p = _pair_input(data)
    _require_field_pair(p)
    t, C = tame.type_of(p)
    std = tame.standard_tau(t, p.ring)
    verification = _check({
        "conjugator_invertible": C.is_invertible(),
        "conjugation_exact": C.inverse() @ p.tau @ C == std,
        "dimension_matches": t.dimension == p.n,
    })
    return {"type": t.to_json(), "conjugator": C.to_json(), "standard_tau": std.to_json()}, verification


def _module_input(data):
    if "module" in data:
        return module_from_json(data["module"])
    p = pair_from_json(data["pair"])
    _require_field_pair(p)
    how = data.get("construction", "pair")
    if how == "pair":
        M = cohom.module_of(p)
    elif how == "ad":
        M = cohom.ad(p)
    elif how == "ad0":
        M = cohom.ad0(p)
    elif how == "hom":
        p2 = pair_from_json(data["pair2"])
        _require_field_pair(p2, "pair2")
        M = cohom.hom(p, p2)
    else:
        raise PreconditionError(f"unknown construction {how!r}",
                                [{"kind": "schema", "where": "construction", "value": how}])
    if data.get("dual"):
        M = cohom.dual(M)
    if data.get("twist"):
        M = cohom.twist(M, int(data["twist"]))
    return M


def cmd_cohomology(data, args):
    M = _module_input(data)
    bad = M.violations()
    if bad:
        raise PreconditionError("invalid local module", bad)
    h0 = cohom.h0_dim(M)
    h2 = cohom.h2_dim(M)
    f = cohom.h1_formula(M)
    o = cohom.h1_oracle(M)
    verification = {"h1_routes_agree": f == o}
    result = {
        "dim": M.dim, "h0": h0, "h2": h2, "h1": f,
        "h1_formula": f, "h1_oracle": o,
        "h1nr": cohom.h1nr_dim(M),
        "unramified_quotient_h1": cohom.unramified_h1_dim(M),
        "unramified": M.is_unramified(),
    }
    if M.is_unramified():
        verification["h1nr_equals_h0"] = result["h1nr"] == h0
    if result["h1"] != o:
        raise InternalDefect("h1 routes disagree", residual={"formula": f, "oracle": o})
    return result, _check(verification)


def cmd_hom_vanish(data, args):
    p1 = pair_from_json(data["pair1"], "pair1")
    p2 = pair_from_json(data["pair2"], "pair2")
    _require_field_pair(p1, "pair1")
    _require_field_pair(p2, "pair2")
    period = cohom.cyclotomic_order(p1.ring, p1.q)
    per_twist = [cohom.h0_dim(cohom.hom(p1, tame.tate_twist(p2, r))) for r in range(period)]
    vanishes = cohom.hom_vanishing_all_twists(p1, p2)
    verification = _check({"routes_agree": vanishes == all(d == 0 for d in per_twist)})
    return {"twist_period": period, "h0_per_twist": per_twist, "vanishes": vanishes}, verification


def cmd_ledger(data, args):
    places = []
    for i, d in enumerate(data.get("places", [])):
        try:
            places.append(ledger.LocalDatum(**d))
        except TypeError as exc:
            raise PreconditionError(f"places[{i}]: {exc}", [{"kind": "schema", "where": f"places[{i}]"}])
    prob = ledger.GlobalProblem(int(data["N"]), int(data.get("degree", 1)), places,
                                int(data.get("dual_selmer_dim", 0)), data.get("ell"))
    bad = [v for d in prob.data for v in d.violations()]
    if bad:
        raise PreconditionError("invalid local data", bad)
    diff = ledger.wiles_difference(prob)
    ok, margin = ledger.tangent_inequality(prob)
    rough = [d.label for d in prob.data if not d.smooth]
    variables = None if rough else ledger.smooth_variable_count(prob)
    result = {
        "wiles_difference": diff,
        "wiles_difference_formula": "sum_v (dim T_v - dim H^0_v)",
        "tangent_inequality": ok,
        "tangent_margin": margin,
        "tangent_inequality_formula": "sum_Sigma dim T_v - (N-2) - sum_Sigma dim H^0_v",
        "relation_bound": ledger.relation_bound(prob),
        "relation_bound_formula": "sum_v gen(J_v) + dim dual Selmer",
        "variables": variables,
        "non_smooth_places": rough,
    }
    sigma_diff = sum(d.dim_T - d.dim_h0 for d in prob.sigma())
    return result, _check({"margin_recomputed": margin == sigma_diff - (prob.N - 2)})


def cmd_big_check(data, args):
    try:
        inp = ledger.BigCheckInput(**data)
    except TypeError as exc:
        raise PreconditionError(str(exc), [{"kind": "schema", "where": "big-check"}])
    out = ledger.big_check(inp)
    crit = out["criteria"]
    verification = {
        "threshold_ii_exact": crit["ii"]["threshold"] == 2 * inp.degree * inp.N ** 3 + 1,
        "threshold_iii_exact": crit["iii"]["threshold"] == inp.N ** (3 * inp.degree * inp.N),
    }
    if inp.d is not None:
        verification["threshold_i_exact"] = crit["i"]["threshold"] == max(5, 2 * inp.e * inp.d * inp.N + 1)
    return out, _check(verification)


def cmd_gl3_classify(data, args):
    try:
        shape = ledger.EllShapeGL3(**data)
    except TypeError as exc:
        raise PreconditionError(str(exc), [{"kind": "schema", "where": "gl3-classify"}])
    out = ledger.classify_ell_gl3(shape)
    verification = {}
    if out["dim_N"] is not None:
        verification["dim_N_matches_pattern"] = out["dim_N"] == ledger.pattern_dim(out["pattern"])
        verification["dim_N_at_least_5"] = out["dim_N"] >= 5
        verification["dim_N_at_least_1_plus_h0_inf"] = out["dim_N"] >= 1 + out["infinity_h0"]
    else:
        verification["omega_cubed_trivial"] = out["omega_order"] in (1, 3)
    return out, _check(verification)


def cmd_main_ledger(data, args):
    N = int(data["N"])
    deg = int(data.get("degree", 1))
    m = int(data.get("m", 1))
    out = ledger.main_theorem_ledger(N, deg, m, data.get("ell_places"), data.get("h3_flag", True))
    verification = _check({
        "margin_closed_form": out["margin"] == 2 * m * (N - m),
        "margin_chain": out["ell_term"] - out["infinity_term"] == out["margin"],
        "margin_at_least_2(N-1)": out["margin_at_least_2(N-1)"],
        "variables_at_least_N-2": out["variables_ok"],
    })
    return out, verification


def _separation_instance(data, where):
    grp = group_from_json(data["group"], f"{where}.group")
    m = int(data.get("m", 1))
    gam = cocycle.build_extension(grp, m, require_simple=data.get("require_simple", True))
    V = data.get("V", [])
    coeffs = [[grp.spec(a) for a in row] for row in V]
    return grp, gam, coeffs


def cmd_cocycle_search(data, args):
    g = int(data.get("g", 0))
    if "instances" in data:
        insts = [_separation_instance(d, f"instances[{i}]") for i, d in enumerate(data["instances"])]
        out = cocycle.multi_module_separating_lift([(gam, c) for _, gam, c in insts], g, seed=args.seed)
        parts = []
        verification = {}
        for i, ((grp, gam, coeffs), res) in enumerate(zip(insts, out["parts"])):
            r = cocycle.verify_separation(gam, coeffs, res.element)
            verification[f"instance_{i}_rank_equals_dim_V"] = r == len(coeffs)
            parts.append(res.to_json())
        return {"g": g, "parts": parts}, _check(verification)
    grp, gam, coeffs = _separation_instance(data, "input")
    simple = cocycle.simple_module_checks(grp, seed=args.seed)
    h1 = cocycle.h1_finite(grp)
    res = cocycle.separating_lift(gam, coeffs, g, seed=args.seed)
    r = cocycle.verify_separation(gam, coeffs, res.element)
    verification = {
        "rank_equals_dim_V": r == len(coeffs),
        "psi_independent": gam.psi_independent(),
    }
    result = {
        "gamma_order": gam.order,
        "simple": simple.to_json(),
        "h1_G_M": h1.dim,
        "witness": res.to_json(),
    }
    if data.get("exhaustive", gam.order <= 10_000):
        wit = cocycle.exhaustive_witnesses(gam, coeffs, g)
        result["exhaustive_witness_count"] = len(wit)
        verification["greedy_in_exhaustive_set"] = res.element in wit
    return result, _check(verification)


def cmd_validate(data, args):
    kind = data.get("object", "pair")
    body = data.get("data", data)
    if kind == "pair":
        p = pair_from_json(body)
        bad = tame.pair_validate(p)
    elif kind == "module":
        bad = module_from_json(body).violations()
    elif kind == "group":
        grp = group_from_json(body)  # raises on invalid tables
        bad = grp.violations()
    elif kind == "det_target":
        k = field_from_json(body)
        ring = k.witt(body["m"]) if body.get("m", 1) > 1 else k
        bad = tame.DetTarget(ring(body["on_sigma"]), ring(body["on_tau"])).violations(int(body["q"]))
    elif kind == "global_problem":
        places = [ledger.LocalDatum(**d) for d in body.get("places", [])]
        prob = ledger.GlobalProblem(int(body["N"]), int(body.get("degree", 1)), places,
                                    int(body.get("dual_selmer_dim", 0)), body.get("ell"))
        bad = [v for d in prob.data for v in d.violations()]
    else:
        raise PreconditionError(f"unknown object {kind!r}", [{"kind": "schema", "where": "object"}])
    if bad:
        raise PreconditionError(f"{kind} fails validation", bad)
    return {"object": kind, "valid": True}, {"all_invariants_hold": True}


HANDLERS = {
    "tame-lift": cmd_tame_lift,
    "type-of": cmd_type_of,
    "cohomology": cmd_cohomology,
    "hom-vanish": cmd_hom_vanish,
    "ledger": cmd_ledger,
    "big-check": cmd_big_check,
    "gl3-classify": cmd_gl3_classify,
    "main-ledger": cmd_main_ledger,
    "cocycle-search": cmd_cocycle_search,
    "validate": cmd_validate,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="galois-lift", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", "-i", required=True, help="JSON file path or inline JSON")
    ap.add_argument("--output", "-o", help="write the report here instead of stdout")
    ap.add_argument("--seed", type=int, default=0, help="seed for every randomized search")
    ap.add_argument("--precision", "-m", type=int, default=None, help="Witt precision m for tame-lift")
    ap.add_argument("--verify-only", action="store_true",
                    help="validate the input and stop before computing")
    return ap


def execute(args) -> tuple[int, dict]:
    """Execute parsed arguments; returns (exit status, report document)."""
    report = {"schema_version": SCHEMA_VERSION, "command": args.command, "seed": args.seed}
    random.seed(args.seed)
    try:
        data = load_input(args.input)
        report["input"] = data
        if not isinstance(data, dict):
            raise PreconditionError("input must be a JSON object", [{"kind": "schema"}])
        result, verification = HANDLERS[args.command](data, args)
        report.update(status="ok", result=result, verification=verification)
        code = 0
    except InternalDefect as exc:
        report.update(status="internal_defect", error=str(exc), residual=exc.residual)
        code = 3
    except PreconditionError as exc:
        report.update(status="invalid_input", error=str(exc), violations=exc.violations)
        code = 2
    except (KeyError, TypeError, ValueError) as exc:
        report.update(status="invalid_input", error=f"malformed input: {exc!r}",
                      violations=[{"kind": "schema", "detail": repr(exc)}])
        code = 2
    return code, report


def run(argv) -> tuple[int, dict]:
    return execute(build_parser().parse_args(argv))


def main(argv=None) -> int:
    args = build_parser().parse_args(sys.argv[1:] if argv is None else argv)
    code, report = execute(args)
    text = dumps(report)
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            sys.stderr.write(f"cannot write output: {exc}\n")
            return 2
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
