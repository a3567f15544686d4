"""Command line front end: ``motpaver <command> problem.json``.

Exit codes: 0 success / certified, 1 failed ``--verify``, 2 not in convex
order, 3 monotonicity violated, 4 unreadable problem or bad arguments.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import golden
from ._numeric import Arith
from .decomposition import componentwise_dual, glue, sub_paving
from .geometry import Polytope, closure_contains, hull_equal, ri_contains, ri_intersects
from .io import (SCHEMA, Problem, ProblemError, dump, load_problem, matrix_json, parse_problem,
                 read_array, read_scalar, value_json, vector_json)
from .measures import DiscreteMeasure, Separation, convex_order_check
from .monotonicity import FinitePlan, certify_support, is_competitor, weakly_convex_check_1d
from .paving import cell_mass_range, compute_paving, nu_invariance
from .transport import Coupling, NotInConvexOrder, setup, slacks, solve_mot

EXIT_OK, EXIT_VERIFY, EXIT_ORDER, EXIT_VIOLATED, EXIT_PARSE = 0, 1, 2, 3, 4


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(os.environ.get("MOTPAVER_SEED", "0"))


def _separation_json(sep: Separation) -> dict:
    return {"phi": vector_json(sep.phi), "psi": vector_json(sep.psi), "h": matrix_json(sep.h)}


def _cert_json(cert) -> dict:
    return {"phi": vector_json(cert.phi), "psi": vector_json(cert.psi),
            "h": matrix_json(cert.h), "value": value_json(cert.value)}


def _order_report(pb: Problem) -> dict:
    cert = convex_order_check(pb.mu, pb.nu)
    out = {"ordered": cert.ordered}
    if cert.ordered:
        out["coupling"] = matrix_json(cert.coupling.p)
    else:
        out["separation"] = _separation_json(cert.separation)
        out["separation_value"] = value_json(cert.separation.value(pb.mu, pb.nu))
    return out


def _paving_json(paving) -> dict:
    nu, ar = paving.nu, paving.arith
    nu_invariance(paving)
    comps = []
    for c in paving.components:
        boundary = set(c.boundary_atoms(nu))
        comps.append({
            "id": c.id,
            "members": c.members,
            "eta": value_json(c.eta),
            "dim": c.dim,
            "vertices": matrix_json(c.vertices()),
            "J": [{"atom": j, "point": vector_json(nu.atoms[j]),
                   "min_mass": scalar_out(c.j_mass[j][0]), "max_mass": scalar_out(c.j_mass[j][1]),
                   "boundary": j in boundary, "in_every_coupling": ar.is_pos(c.j_mass[j][0])}
                  for j in c.j_atoms],
            "nu_invariant": c.nu_invariant,
        })
    sup = paving.support
    return {
        "components": comps,
        "atom_component": paving.atom_component,
        "support": [[i, j] for i, j in sorted(sup.pairs)],
        "max_mass": [scalar_out(sup.max_mass[q]) for q in sorted(sup.pairs)],
        "witness": matrix_json(sup.witness.p),
    }


def scalar_out(v):
    return str(v) if isinstance(v, Fraction) else float(v)


def cmd_check_order(pb: Problem, args) -> tuple[dict, int]:
    rep = _order_report(pb)
    return rep, EXIT_OK if rep["ordered"] else EXIT_ORDER


def cmd_solve(pb: Problem, args) -> tuple[dict, int]:
    res = solve_mot(pb.mu, pb.nu, pb.cost)
    return {"value": value_json(res.value), "coupling": matrix_json(res.coupling.p),
            "certificate": _cert_json(res.certificate), "gap": value_json(res.gap)}, EXIT_OK


def cmd_pave(pb: Problem, args) -> tuple[dict, int]:
    paving = compute_paving(pb.mu, pb.nu, jobs=args.jobs)
    rep = _paving_json(paving)
    if getattr(args, "plot", None):
        from .plot import plot_paving
        plot_paving(paving, args.plot)
        rep["plot"] = str(args.plot)
    return rep, EXIT_OK


def cmd_decompose(pb: Problem, args) -> tuple[dict, int]:
    paving = compute_paving(pb.mu, pb.nu, jobs=args.jobs)
    glob = solve_mot(pb.mu, pb.nu, pb.cost)
    duals = componentwise_dual(pb.mu, pb.nu, pb.cost, paving)
    ar = paving.arith
    total = sum((cd.problem.eta * cd.value for cd in duals), ar.convert(0))
    glued = glue(duals, pb.mu, pb.nu, pb.cost)
    comps = []
    for cd in duals:
        p = cd.problem
        subs = sub_paving(p)
        comps.append({
            "id": p.component, "eta": value_json(p.eta), "members": p.members,
            "targets": p.targets, "value": value_json(cd.value),
            "certificate": _cert_json(cd.certificate), "gap": value_json(cd.gap),
            "psi_convex_extendable": cd.convex_psi,
            "sub_paving": [matrix_json(c.vertices()) for c in subs.components],
        })
    return {
        "value": value_json(glob.value),
        "weighted_sum": value_json(total),
        "holds": ar.eq(total, glob.value),
        "coupling": matrix_json(glob.coupling.p),
        "certificate": _cert_json(glob.certificate),
        "components": comps,
        "glued_off_scope_violations": [list(q) for q in glued.violations(ar, on_scope=False)],
        "glued_on_scope_violations": [list(q) for q in glued.violations(ar, on_scope=True)],
    }, EXIT_OK


def _read_gamma(source: str, pb: Problem):
    if source == "optimizer":
        res = solve_mot(pb.mu, pb.nu, pb.cost)
        return sorted(res.coupling.support()), res
    data = json.loads(Path(source).read_text(encoding="utf-8"))
    pairs = data["pairs"] if isinstance(data, dict) else data
    gamma = []
    for q in pairs:
        i, j = int(q[0]), int(q[1])
        if not (0 <= i < len(pb.mu) and 0 <= j < len(pb.nu)):
            raise ProblemError(f"pair {q} out of range", "gamma")
        gamma.append((i, j))
    return sorted(set(gamma)), None


def _witness_json(w) -> dict:
    return {"rows": w.rows, "cols": w.cols, "plan": matrix_json(w.plan.mass),
            "competitor": matrix_json(w.competitor.mass), "gap": value_json(w.gap)}


def cmd_certify(pb: Problem, args) -> tuple[dict, int]:
    gamma, res = _read_gamma(args.gamma, pb)
    weights = None
    if res is not None:
        weights = {q: res.coupling.p[q] for q in gamma}
    cert = certify_support(gamma, pb.mu, pb.nu, pb.cost, budget=args.budget,
                           max_x=args.max_x, seed=_seed(args), weights=weights)
    rep = {"gamma": [list(q) for q in gamma], "verdict": cert.verdict, "trials": cert.trials,
           "params": cert.params}
    if cert.witness is not None:
        rep["witness"] = _witness_json(cert.witness)
    return rep, EXIT_OK if cert.certified else EXIT_VIOLATED


def _demo_problem(inst, exact=True) -> Problem:
    ar = inst.mu.arith.join(inst.nu.arith)
    cost = inst.cost if inst.cost is not None else ar.zeros((len(inst.mu), len(inst.nu)))
    return Problem(inst.mu, inst.nu, ar.array(cost), ar, {})


def cmd_demo(args) -> tuple[dict, int, Problem]:
    name = args.name
    if name not in golden.DEMOS:
        raise ProblemError(f"unknown demo {name!r}; choose from {sorted(golden.DEMOS)}", "demo")
    extra: dict = {}
    if name == "example-4.2":
        inst = golden.example_4_2()
        pb = _demo_problem(inst)
        paving = compute_paving(pb.mu, pb.nu, jobs=args.jobs)
        extra["couplings"] = {k: {"violations": c.violations(), "mass": matrix_json(c.p)}
                              for k, c in inst.couplings.items()}
        dec, _ = cmd_decompose(pb, args)
        extra["decomposition"] = dec
        res = solve_mot(pb.mu, pb.nu, pb.cost)
        opt = certify_support(res.coupling.support(), pb.mu, pb.nu, pb.cost, seed=_seed(args))
        p1 = certify_support(inst.couplings["P1"].support(), pb.mu, pb.nu, pb.cost, seed=_seed(args))
        extra["certify_optimizer"] = opt.verdict
        extra["certify_P1"] = {"verdict": p1.verdict,
                               "witness": _witness_json(p1.witness) if p1.witness else None}
    elif name == "example-4.1":
        inst = golden.example_4_1(args.grid or 8, exact=not args.float)
        pb = _demo_problem(inst)
        paving = compute_paving(pb.mu, pb.nu, jobs=args.jobs)
        lo, hi = cell_mass_range(pb.mu, pb.nu, paving.region)
        extra["max_cell_mass_gap"] = value_json(max((hi - lo).ravel()))
    else:
        inst = golden.example_2_1(args.grid or 16)
        pb = _demo_problem(inst)
        paving = compute_paving(pb.mu, pb.nu, jobs=args.jobs)
        extra["boundary_atoms"] = [vector_json(pb.nu.atoms[c.boundary_atoms(pb.nu)].ravel())
                                   for c in paving.components]
        f = [abs(y[0] + 1) if y[0] < 0 else (1 if y[0] == 0 else abs(y[0] - 1) - 5)
             for y in pb.nu.atoms]
        extra["weakly_convex_example"] = weakly_convex_check_1d(f, paving)
    rep = _paving_json(paving)
    rep.update({"demo": name, "grid": args.grid, "labels": {"mu": inst.mu_labels, "nu": inst.nu_labels}})
    rep["checks"] = extra
    if getattr(args, "plot", None) and pb.d == 2:
        from .plot import plot_paving
        plot_paving(paving, args.plot, title=name)
        rep["plot"] = str(args.plot)
    return rep, EXIT_OK, pb


COMMANDS = {"check-order": cmd_check_order, "solve": cmd_solve, "pave": cmd_pave,
            "decompose": cmd_decompose, "certify": cmd_certify}


# --- independent re-checking of reports ---------------------------------

def _coupling_from(rep_matrix, pb: Problem) -> Coupling:
    return Coupling(pb.mu, pb.nu, read_array(rep_matrix, pb.arith))


def _check_cert(cert: dict, mu, nu, cost, ar: Arith, scope=None) -> list[str]:
    phi = read_array(cert["phi"], ar)
    psi = read_array(cert["psi"], ar)
    h = read_array(cert["h"], ar).reshape(len(mu), mu.d)
    s = slacks(mu, nu, phi, psi, h, cost)
    cells = scope if scope is not None else [(i, j) for i in range(len(mu)) for j in range(len(nu))]
    errs = [f"slack {s[q]} < 0 at {q}" for q in cells if ar.is_neg(s[q])]
    val = mu.integrate(phi) + nu.integrate(psi)
    if not ar.eq(val, read_scalar(cert["value"], ar)):
        errs.append(f"certificate value {val} differs from reported")
    return errs


def _check_paving(rep: dict, pb: Problem) -> list[str]:
    ar = pb.arith
    errs = []
    witness = _coupling_from(rep["witness"], pb)
    errs += [f"witness: {v}" for v in witness.violations()]
    support = {tuple(q) for q in rep["support"]}
    if witness.support() != support:
        errs.append("witness support differs from the reported support")
    polys = []
    total = ar.convert(0)
    for comp in rep["components"]:
        P = Polytope(read_array(comp["vertices"], ar), ar)
        polys.append(P)
        eta = read_scalar(comp["eta"], ar)
        total += eta
        if not ar.eq(eta, sum((pb.mu.weights[i] for i in comp["members"]), ar.convert(0))):
            errs.append(f"component {comp['id']}: eta mismatch")
        for i in comp["members"]:
            if not ri_contains(P, pb.mu.atoms[i]):
                errs.append(f"atom {i} not in ri of component {comp['id']}")
            row = witness.row_support(i)
            if not hull_equal(P, Polytope(pb.nu.atoms[row], ar)):
                errs.append(f"atom {i}: witness row hull differs from component {comp['id']}")
        for J in comp["J"]:
            if not closure_contains(P, pb.nu.atoms[J["atom"]]):
                errs.append(f"J atom {J['atom']} outside cl of component {comp['id']}")
    if not ar.eq(total, 1):
        errs.append(f"eta sums to {total}")
    for a in range(len(polys)):
        for b in range(a + 1, len(polys)):
            if ri_intersects(polys[a], polys[b]):
                errs.append(f"components {a} and {b} overlap")
    return errs


def verify_report(report: dict) -> list[str]:
    """Re-check every certificate in ``report`` against its embedded problem."""
    if report.get("schema") != SCHEMA:
        return [f"unknown schema {report.get('schema')!r}"]
    pb = parse_problem(report["problem"])
    mu, nu, cost, ar = setup(pb.mu, pb.nu, pb.cost)
    cmd = report["command"]
    r = report["result"]
    errs: list[str] = []
    if cmd == "check-order" or r.get("ordered") is False:
        if r["ordered"]:
            errs += _coupling_from(r["coupling"], pb).violations()
        else:
            s = r["separation"]
            sep = Separation(read_array(s["phi"], ar), read_array(s["psi"], ar),
                             read_array(s["h"], ar).reshape(len(mu), mu.d))
            if not sep.verify(mu, nu):
                errs.append("separating triple does not verify")
    elif cmd in ("solve", "decompose"):
        cp = _coupling_from(r["coupling"], pb)
        errs += cp.violations()
        val = read_scalar(r["value"], ar)
        if not ar.eq(cp.value(cost), val):
            errs.append("coupling value differs from the reported value")
        errs += _check_cert(r["certificate"], mu, nu, cost, ar)
        if not ar.eq(read_scalar(r["certificate"]["value"], ar), val):
            errs.append("nonzero duality gap")
        if cmd == "decompose":
            total = ar.convert(0)
            for comp in r["components"]:
                rows, cols = comp["members"], comp["targets"]
                eta = read_scalar(comp["eta"], ar)
                mass = cp.p[rows].sum(axis=0)
                mu_I = DiscreteMeasure(mu.atoms[rows], [mu.weights[i] / eta for i in rows], ar)
                nu_I = DiscreteMeasure(nu.atoms[cols], [mass[j] / eta for j in cols], ar)
                sub = Coupling(mu_I, nu_I, cp.p[np.ix_(rows, cols)] / eta)
                errs += [f"component {comp['id']}: {v}" for v in sub.violations()]
                v = read_scalar(comp["value"], ar)
                if not ar.eq(sub.value(cost[np.ix_(rows, cols)]), v):
                    errs.append(f"component {comp['id']}: coupling does not attain its value")
                errs += _check_cert(comp["certificate"], mu_I, nu_I, cost[np.ix_(rows, cols)], ar)
                if not ar.eq(read_scalar(comp["certificate"]["value"], ar), v):
                    errs.append(f"component {comp['id']}: nonzero gap")
                total += eta * v
            if not ar.eq(total, read_scalar(r["weighted_sum"], ar)):
                errs.append("weighted sum mismatch")
            if r["holds"] != ar.eq(total, val):
                errs.append("decomposition verdict not reproduced")
    elif cmd in ("pave", "demo"):
        errs += _check_paving(r, pb)
    elif cmd == "certify":
        if r["verdict"] == "violated":
            w = r["witness"]
            rows, cols = w["rows"], w["cols"]
            gamma = {tuple(q) for q in r["gamma"]}
            plan = FinitePlan(mu.atoms[rows], nu.atoms[cols], read_array(w["plan"], ar), ar)
            comp = FinitePlan(mu.atoms[rows], nu.atoms[cols], read_array(w["competitor"], ar), ar)
            if any((rows[a], cols[b]) not in gamma for a, b in plan.pairs()):
                errs.append("witness plan leaves gamma")
            if not is_competitor(plan, comp):
                errs.append("witness is not a competitor")
            sub = cost[np.ix_(rows, cols)]
            if not ar.is_pos(comp.value(sub) - plan.value(sub)):
                errs.append("witness does not improve the cost")
    else:
        errs.append(f"unknown command {cmd!r}")
    return errs


# --- entry point ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="motpaver", description=__doc__.splitlines()[0])
    ap.add_argument("--jobs", type=int, default=1, help="parallel LP workers")
    ap.add_argument("--seed", type=int, default=None, help="sweep seed (default $MOTPAVER_SEED or 0)")
    ap.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")
    ap.add_argument("--verify", metavar="REPORT", help="re-check the certificates in a report")
    sub = ap.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("problem")
        if name == "pave":
            p.add_argument("--plot", metavar="PATH")
        if name == "certify":
            p.add_argument("--gamma", default="optimizer", help="'optimizer' or a JSON file of pairs")
            p.add_argument("--budget", type=int, default=200)
            p.add_argument("--max-x", type=int, default=4)
    p = sub.add_parser("demo")
    p.add_argument("name", help=", ".join(sorted(golden.DEMOS)))
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--float", action="store_true", help="solve the demo in float mode")
    p.add_argument("--plot", metavar="PATH")
    return ap


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.verify:
        try:
            report = json.loads(Path(args.verify).read_text(encoding="utf-8"))
            errs = verify_report(report)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            print(f"motpaver: cannot verify: {exc}", file=sys.stderr)
            return EXIT_PARSE
        print(dump({"verified": not errs, "errors": errs}), file=out)
        return EXIT_OK if not errs else EXIT_VERIFY
    if args.command is None:
        ap.print_usage(sys.stderr)
        return EXIT_PARSE
    t0 = time.perf_counter()
    try:
        if args.command == "demo":
            result, code, pb = cmd_demo(args)
        else:
            pb = load_problem(args.problem)
            result, code = COMMANDS[args.command](pb, args)
    except ProblemError as exc:
        print(f"motpaver: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"motpaver: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotInConvexOrder as exc:
        sep = exc.certificate.separation
        report = {"schema": SCHEMA, "command": args.command, "problem": pb.to_json(),
                  "result": {"ordered": False, "separation": _separation_json(sep)}}
        print(dump(report), file=out)
        return EXIT_ORDER
    report = {"schema": SCHEMA, "command": args.command,
              "argv": list(argv) if argv is not None else sys.argv[1:],
              "seed": _seed(args), "problem": pb.to_json(), "result": result}
    if args.timing:
        report["timing_s"] = round(time.perf_counter() - t0, 4)
    print(dump(report), file=out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
