"""seplat command line: lattice generation, separation queries, shielder-off
checks, sweep verification, Monte-Carlo experiments, DOT/JSON export.

Exit codes: 0 = verdict true / success, 1 = verdict false, 2 = usage error,
3 = internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from typing import Sequence

from . import lattice as lat
from . import markov as mk
from .errors import BudgetExceeded, SeparatedInput, SeplatError
from .graph import (
    MixedGraph,
    format_path,
    graph_from_json_dict,
    graph_to_json_dict,
)
from .separation import (
    INCLUSIVE,
    STRICT,
    SeparationQuery,
    is_separated,
    is_separated_oracle,
    minimal_separator,
)

CSV_HEADER = ["candidate_set", "l1", "l2", "l3", "shielder_off", "separated", "witness"]
MC_CSV_HEADER = ["query", "atoms_checked", "max_violation", "verdict"]


def _write_mc_report(path: str, rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=";")
        writer.writerow(MC_CSV_HEADER)
        writer.writerows(rows)


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True))


def graph_document_text(g: MixedGraph, kind: str = "abstract",
                        window: dict | None = None) -> str:
    return json.dumps(graph_to_json_dict(g, kind, window),
                      indent=2, sort_keys=True) + "\n"


def dot_text(g: MixedGraph) -> str:
    lines = ["digraph G {"]
    for v in g.vertices:
        lines.append(f'  "{v}";')
    for u, v in g.directed:
        lines.append(f'  "{u}" -> "{v}";')
    for u, v in g.bidirected:
        lines.append(f'  "{u}" -> "{v}" [dir=both];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _load_graph(path: str) -> tuple[MixedGraph, str, lat.Window | None]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    g, kind, wdict = graph_from_json_dict(doc)
    window = lat.window_from_dict(kind, wdict) if (wdict and kind != "abstract") else None
    return g, kind, window


def _parse_label_set(literal: str | None) -> frozenset[str]:
    if not literal:
        return frozenset()
    return frozenset(p for p in literal.split("+") if p)


def _require_lattice(kind: str, window: lat.Window | None) -> lat.Window:
    if kind == "abstract" or window is None:
        raise ValueError("this command needs a lattice graph with a window")
    return window


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_lattice_gen(args) -> int:
    if args.kind == lat.DIAMOND:
        bounds = (args.imin, args.imax, args.jmin, args.jmax)
    else:
        bounds = (args.kmin, args.kmax, args.mmin, args.mmax)
    if any(b is None for b in bounds):
        raise ValueError(f"missing window bounds for kind {args.kind!r}")
    window = lat.Window(*bounds)
    g = lat.build_graph(args.kind, window)
    text = graph_document_text(g, args.kind, lat.window_to_dict(args.kind, window))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    _emit({"vertices": len(g.vertices), "directed": len(g.directed),
           "bidirected": len(g.bidirected), "out": args.out})
    return 0


def _cmd_sep_check(args) -> int:
    g, _kind, _window = _load_graph(args.graph)
    q = SeparationQuery(args.a, args.b, _parse_label_set(args.c), args.convention)
    verdict = is_separated_oracle(g, q) if args.oracle else is_separated(g, q)
    payload = {"separated": verdict.separated,
               "witness": format_path(verdict.witness) if verdict.witness else None}
    if args.format == "csv":
        print(f"{args.a};{args.b};{verdict.separated};{payload['witness'] or '-'}")
    else:
        _emit(payload)
    return 0 if verdict.separated else 1


def _cmd_sep_minimal(args) -> int:
    g, _kind, _window = _load_graph(args.graph)
    sep = minimal_separator(g, args.a, args.b)
    if sep is None:
        _emit({"separator": None})
        return 1
    def _ok(cond):
        return is_separated(g, SeparationQuery(args.a, args.b, cond)).separated
    certificate = {
        "separates": _ok(sep),
        "single_removal_breaks": all(not _ok(sep - {v}) for v in sep),
    }
    _emit({"separator": sorted(sep), "certificate": certificate})
    return 0


def _cmd_shield_check(args) -> int:
    g, kind, window = _load_graph(args.graph)
    window = _require_lattice(kind, window)
    cell_a, cell_b = lat.parse_cell(args.a), lat.parse_cell(args.b)
    region = lat.parse_region(args.region)
    verdict = lat.shielder_off(region, cell_a, cell_b, args.variant, window)
    sep = is_separated(g, SeparationQuery(
        args.a, args.b, lat.region_to_vertexset(region, g), args.convention))
    _emit({"l1": verdict.l1, "l2": verdict.l2, "l3": verdict.l3,
           "variant": verdict.variant, "shielder_off": verdict.shielder_off,
           "separated": sep.separated,
           "witness": format_path(sep.witness) if sep.witness else None})
    return 0 if verdict.shielder_off else 1


def _cmd_prop1_verify(args) -> int:
    g, kind, window = _load_graph(args.graph)
    window = _require_lattice(kind, window)
    cell_a, cell_b = lat.parse_cell(args.a), lat.parse_cell(args.b)
    pool = lat.geo_ancestors(cell_a, window)
    max_cells = args.max_cells if args.max_cells is not None else len(pool)
    if lat.candidate_count(len(pool), max_cells) > args.budget:
        raise BudgetExceeded(
            f"{lat.candidate_count(len(pool), max_cells)} candidates exceed "
            f"budget {args.budget}; pass --max-cells")
    report = lat.prop1_sweep(kind, window, cell_a, cell_b, args.variant,
                             max_cells, args.convention, args.budget,
                             lattice_graph=g)
    rows = [[ "+".join(r.region), str(r.l1).lower(), str(r.l2).lower(),
              str(r.l3).lower(), str(r.shielder_off).lower(),
              str(r.separated).lower(),
              format_path(r.witness) if r.witness else "-"]
            for r in report.rows]
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, delimiter=";")
            writer.writerow(CSV_HEADER)
            writer.writerows(rows)
    _emit({"candidates": report.total,
           "shielder_off": report.shielder_off_count,
           "counterexamples": [list(r.region) for r in report.counterexamples],
           "report": args.report})
    return 0 if not report.counterexamples else 1


def _cmd_mc_soundness(args) -> int:
    g, _kind, _window = _load_graph(args.graph)
    dag, latent = mk.latent_expansion(g)
    observed = sorted(g.vertices)
    checked = skipped = 0
    max_violation = 0.0
    violations = []
    rows = []
    for trial in range(args.trials):
        seed = args.seed * 1_000_003 + trial
        rng = random.Random(seed)
        a, b = rng.sample(observed, 2)
        rest = [v for v in observed if v not in (a, b)]
        cond = frozenset(rng.sample(rest, min(rng.randint(0, args.max_cond), len(rest))))
        query = f"{a}_|_{b}|{'+'.join(sorted(cond))}"
        try:
            margin = mk.ancestral_margin(dag, mk.random_cpts(dag, seed),
                                         {a, b} | cond, latent, args.budget)
        except BudgetExceeded:
            skipped += 1
            rows.append([query, 0, "", "skipped:budget"])
            continue
        if not is_separated(g, SeparationQuery(a, b, cond)).separated:
            skipped += 1
            rows.append([query, 0, "", "skipped:connected"])
            continue
        viol, atoms = mk.ci_details(margin, mk.EventRef.single(a),
                                    mk.EventRef.single(b), sorted(cond))
        checked += 1
        max_violation = max(max_violation, viol)
        ok = viol <= args.tol
        rows.append([query, atoms, f"{viol:.3e}", "ci" if ok else "violation"])
        if not ok:
            violations.append({"a": a, "b": b, "cond": sorted(cond), "violation": viol})
    if args.report:
        _write_mc_report(args.report, rows)
    _emit({"trials": args.trials, "checked": checked, "skipped": skipped,
           "max_violation": max_violation, "violations": violations,
           "report": args.report})
    return 0 if not violations else 1


def _cmd_mc_witness(args) -> int:
    g, _kind, _window = _load_graph(args.graph)
    cond = _parse_label_set(args.c)
    cpts = mk.find_dependence_witness(g, args.a, args.b, cond,
                                      args.attempts, args.threshold, args.seed)
    if cpts is None:
        _emit({"found": False})
        return 1
    dag, latent = mk.latent_expansion(g)
    margin = mk.ancestral_margin(dag, cpts, {args.a, args.b} | cond, latent)
    viol = mk.ci_violation(margin, mk.EventRef.single(args.a),
                           mk.EventRef.single(args.b), sorted(cond))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(cpts.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    _emit({"found": True, "violation": viol, "out": args.out})
    return 0


def _cmd_mc_local_causality(args) -> int:
    g, kind, window = _load_graph(args.graph)
    window = _require_lattice(kind, window)
    dag, _latent = mk.latent_expansion(g)
    cpts = mk.random_cpts(dag, args.seed)
    report = mk.is_locally_causal(kind, window, cpts, args.variant,
                                  tol=args.tol, max_cells=args.max_cells)
    if args.report:
        rows = [[f"{c.pair[0]}_|_{c.pair[1]}|{'+'.join(c.region)}", c.atoms,
                 f"{c.violation:.3e}", "ci" if c.passed else "violation"]
                for p in report.probes for c in p.checks]
        _write_mc_report(args.report, rows)
    _emit({
        "locally_causal": report.locally_causal,
        "screening_failures": len(report.failures),
        "probes": [{"a": p.a, "b": p.b, "correlated": p.correlated,
                    "regions_checked": p.regions_checked,
                    "atoms_checked": p.atoms_checked,
                    "max_violation": p.max_violation} for p in report.probes],
        "report": args.report,
    })
    return 0 if report.locally_causal else 1


def _cmd_export_dot(args) -> int:
    g, _kind, _window = _load_graph(args.graph)
    text = dot_text(g)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    plain = sum(1 for line in text.splitlines() if "->" in line and "dir=both" not in line)
    both = sum(1 for line in text.splitlines() if "dir=both" in line)
    _emit({"directed": plain, "bidirected": both, "out": args.out})
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seplat")
    top = parser.add_subparsers(dest="group", required=True)

    lattice = top.add_parser("lattice").add_subparsers(dest="cmd", required=True)
    gen = lattice.add_parser("gen")
    gen.add_argument("--kind", choices=(lat.DIAMOND, lat.BOX), required=True)
    for name in ("imin", "imax", "jmin", "jmax", "kmin", "kmax", "mmin", "mmax"):
        gen.add_argument(f"--{name}", type=int)
    gen.add_argument("--out")
    gen.set_defaults(func=_cmd_lattice_gen)

    sep = top.add_parser("sep").add_subparsers(dest="cmd", required=True)
    check = sep.add_parser("check")
    check.add_argument("--graph", required=True)
    check.add_argument("--a", required=True)
    check.add_argument("--b", required=True)
    check.add_argument("--c", default="")
    check.add_argument("--oracle", action="store_true")
    check.add_argument("--convention", choices=(INCLUSIVE, STRICT), default=INCLUSIVE)
    check.add_argument("--format", choices=("json", "csv"), default="json")
    check.set_defaults(func=_cmd_sep_check)
    minimal = sep.add_parser("minimal")
    minimal.add_argument("--graph", required=True)
    minimal.add_argument("--a", required=True)
    minimal.add_argument("--b", required=True)
    minimal.set_defaults(func=_cmd_sep_minimal)

    shield = top.add_parser("shield").add_subparsers(dest="cmd", required=True)
    scheck = shield.add_parser("check")
    scheck.add_argument("--graph", required=True)
    scheck.add_argument("--a", required=True)
    scheck.add_argument("--b", required=True)
    scheck.add_argument("--region", required=True)
    scheck.add_argument("--variant", choices=(lat.L3C, lat.L3Q), default=lat.L3C)
    scheck.add_argument("--convention", choices=(INCLUSIVE, STRICT), default=INCLUSIVE)
    scheck.set_defaults(func=_cmd_shield_check)

    prop1 = top.add_parser("prop1").add_subparsers(dest="cmd", required=True)
    verify = prop1.add_parser("verify")
    verify.add_argument("--graph", required=True)
    verify.add_argument("--a", required=True)
    verify.add_argument("--b", required=True)
    verify.add_argument("--variant", choices=(lat.L3C, lat.L3Q), default=lat.L3C)
    verify.add_argument("--convention", choices=(INCLUSIVE, STRICT), default=INCLUSIVE)
    verify.add_argument("--max-cells", type=int)
    verify.add_argument("--budget", type=int, default=lat.DEFAULT_ENUM_BUDGET)
    verify.add_argument("--report")
    verify.set_defaults(func=_cmd_prop1_verify)

    mc = top.add_parser("mc").add_subparsers(dest="cmd", required=True)
    soundness = mc.add_parser("soundness")
    soundness.add_argument("--graph", required=True)
    soundness.add_argument("--trials", type=int, default=100)
    soundness.add_argument("--seed", type=int, default=0)
    soundness.add_argument("--tol", type=float, default=1e-9)
    soundness.add_argument("--max-cond", type=int, default=3)
    soundness.add_argument("--budget", type=int, default=mk.DEFAULT_JOINT_BUDGET)
    soundness.add_argument("--report")
    soundness.set_defaults(func=_cmd_mc_soundness)
    witness = mc.add_parser("witness")
    witness.add_argument("--graph", required=True)
    witness.add_argument("--a", required=True)
    witness.add_argument("--b", required=True)
    witness.add_argument("--c", default="")
    witness.add_argument("--attempts", type=int, default=500)
    witness.add_argument("--threshold", type=float, default=0.01)
    witness.add_argument("--seed", type=int, default=0)
    witness.add_argument("--out")
    witness.set_defaults(func=_cmd_mc_witness)
    local = mc.add_parser("local-causality")
    local.add_argument("--graph", required=True)
    local.add_argument("--variant", choices=(lat.L3C, lat.L3Q), default=lat.L3C)
    local.add_argument("--seed", type=int, default=0)
    local.add_argument("--tol", type=float, default=1e-9)
    local.add_argument("--max-cells", type=int)
    local.add_argument("--report")
    local.set_defaults(func=_cmd_mc_local_causality)

    export = top.add_parser("export").add_subparsers(dest="cmd", required=True)
    dot = export.add_parser("dot")
    dot.add_argument("--graph", required=True)
    dot.add_argument("--out")
    dot.set_defaults(func=_cmd_export_dot)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SeparatedInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SeplatError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - invariant violations
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
