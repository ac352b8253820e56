"""Command-line surface.

One subcommand per capability: build and inspect levels, validate cover
axioms, materialize and export graphs, run orbits, measure distances and
degrees, scan for Li-Yorke behavior, verify the mixing gap claims, check
cover documents, and run the acceptance battery.

Determinism contract: identical arguments (including --seed) produce
byte-identical artifacts.  Exit codes: 0 = pass, 1 = a checked property
failed, 2 = usage or budget error.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import random
import sys
from pathlib import Path

from . import analysis, bouquet, dsl, dynamics, graphs, verify
from .bouquet import DEFAULT_SCAN_BUDGET, VertexAddr, build_level_spec
from .dynamics import PointHandle
from .errors import BudgetExceeded, ChaoscopeError, SpineExhausted, StructuralError

BUDGET_ENV = "CHAOSCOPE_BUDGET"


class UsageError(ChaoscopeError):
    pass


def _default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_SCAN_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{BUDGET_ENV} must be an integer, got {raw!r}")


def parse_handle(spec: str) -> PointHandle:
    """Handle spec: SPINE:CYCLE:POS, optionally @OFFSET (cycle 0 = fixed point)."""
    try:
        body, _, off = spec.partition("@")
        spine_s, cycle_s, pos_s = body.split(":")
        spine, cycle, pos = int(spine_s), int(cycle_s), int(pos_s)
        offset = int(off) if off else 0
    except ValueError:
        raise UsageError(f"bad handle spec {spec!r}, expected SPINE:CYCLE:POS[@T]")
    if cycle == 0:
        if pos != 0:
            raise UsageError("the base handle needs pos 0")
        return dynamics.step(dynamics.fixed_point(spine), offset)
    return dynamics.new_handle(spine, cycle, pos, offset)


class Emitter:
    """Collects named artifacts; writes them to --out with a manifest, or
    prints the primary one to stdout."""

    def __init__(self, out_dir: str | None, command: str, config: dict):
        self.out_dir = Path(out_dir) if out_dir else None
        self.command = command
        self.config = config
        self.artifacts: list[tuple[str, str]] = []

    def add(self, name: str, text: str) -> None:
        self.artifacts.append((name, text))

    def flush(self) -> None:
        if self.out_dir is None:
            for _, text in self.artifacts:
                sys.stdout.write(text)
            return
        self.out_dir.mkdir(parents=True, exist_ok=True)
        records = []
        for name, text in self.artifacts:
            data = text.encode("utf-8")
            (self.out_dir / name).write_bytes(data)
            records.append({"path": name, "bytes": len(data),
                            "sha256": hashlib.sha256(data).hexdigest()})
        manifest = {"command": self.command, "config": self.config,
                    "artifacts": records}
        (self.out_dir / "manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n")
        print(f"wrote {len(records)} artifact(s) to {self.out_dir}")


# ---------------------------------------------------------------------------
# Subcommand implementations.  Each returns the process exit code.
# ---------------------------------------------------------------------------

def _load_tower(path: str | None) -> list[bouquet.LevelSpec] | None:
    if path is None:
        return None
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read cover file: {exc}")
    doc = dsl.parse(text)
    problems = dsl.validate_document(doc)
    if problems:
        raise UsageError("invalid cover document: " + str(problems[0]))
    return dsl.document_tower(doc)


def _spec_for(tower: list[bouquet.LevelSpec] | None):
    if tower is None:
        return build_level_spec

    def from_tower(level: int) -> bouquet.LevelSpec:
        if level >= len(tower):
            raise UsageError(f"cover document ends at level {len(tower) - 1}")
        return tower[level]

    return from_tower


def cmd_levels(args) -> int:
    tower = _load_tower(args.cover)
    spec_for = _spec_for(tower)
    rows = []
    for n in range(0, args.max + 1):
        spec = spec_for(n)
        if args.formulas:
            rows.append(bouquet.level_spec_json(spec))
        else:
            rows.append({"level": n, "k": str(spec.k_value),
                         "cycle_lengths": [str(x) for x in spec.cycle_lengths]})
    emit = Emitter(args.out, "levels", {"max": args.max, "cover": args.cover})
    if args.format == "json" or args.formulas:
        emit.add("levels.json", json.dumps(rows, sort_keys=True, indent=2) + "\n")
    else:
        lines = [f"{'level':>5}  {'k':>12}  cycle lengths"]
        for row in rows:
            lines.append(f"{row['level']:>5}  {row['k']:>12}  "
                         + (", ".join(row["cycle_lengths"]) or "-"))
        emit.add("levels.txt", "\n".join(lines) + "\n")
    emit.flush()
    return 0


def cmd_validate(args) -> int:
    tower = _load_tower(args.cover)
    spec_for = _spec_for(tower)
    failures = 0
    lines = []
    for n in range(0, args.max_level + 1):
        level = bouquet.materialize_graph(n, args.vertex_budget, spec_for=spec_for)
        surj = graphs.validate_edge_surjective(level.graph)
        hom = bd = []
        if level.cover is not None:
            hom = graphs.validate_homomorphism(level.cover)
            bd = graphs.validate_bidirectional(level.cover)
        bad = len(surj) + len(hom) + len(bd)
        failures += bad
        lines.append(f"level {n}: {level.graph.vertex_count} vertices, "
                     f"{level.graph.edge_count} edges, "
                     f"violations: surjectivity {len(surj)}, homomorphism "
                     f"{len(hom)}, bidirectionality {len(bd)}")
    emit = Emitter(args.out, "validate",
                   {"max_level": args.max_level, "cover": args.cover})
    emit.add("validate.txt", "\n".join(lines) + "\n")
    emit.flush()
    return 0 if failures == 0 else 1


def cmd_materialize(args) -> int:
    tower = _load_tower(args.cover)
    level = bouquet.materialize_graph(args.level, args.vertex_budget,
                                      spec_for=_spec_for(tower))
    emit = Emitter(args.out, "materialize",
                   {"level": args.level, "cover": args.cover, "dot": args.dot})
    stats = graphs.graph_stats(level.graph, level.level, level.cycle_lengths)
    emit.add(f"level{args.level}.stats.json",
             json.dumps(stats, sort_keys=True, indent=2) + "\n")
    if args.dot:
        buf = io.StringIO()
        graphs.write_dot(level.graph, buf, name=f"level_{args.level}")
        emit.add(f"level{args.level}.dot", buf.getvalue())
    emit.flush()
    return 0


def cmd_orbit(args) -> int:
    if args.base:
        handle = dynamics.fixed_point(args.spine)
    else:
        if args.cycle is None or args.pos is None:
            raise UsageError("orbit needs --cycle and --pos (or --base)")
        handle = dynamics.new_handle(args.spine, args.cycle, args.pos)
    depth = args.obs if args.obs is not None else args.spine
    if depth > args.spine:
        raise UsageError("--obs cannot exceed --spine")
    emit = Emitter(args.out, "orbit",
                   {"spine": args.spine, "cycle": args.cycle, "pos":
                    str(args.pos), "obs": depth, "horizon": args.horizon,
                    "format": args.format, "base": args.base})
    buf = io.StringIO()
    if args.format == "jsonl":
        dynamics.write_orbit_jsonl(buf, handle, depth, args.horizon)
        emit.add("orbit.jsonl", buf.getvalue())
    else:
        dynamics.write_orbit_csv(buf, handle, depth, args.horizon)
        emit.add("orbit.csv", buf.getvalue())
    emit.flush()
    return 0


def cmd_distance(args) -> int:
    a = parse_handle(args.a)
    b = parse_handle(args.b)
    d = dynamics.distance(a, b)
    record = {"a": a.to_json(), "b": b.to_json(),
              "exact": d.exact, "level": d.level, "distance": str(d)}
    emit = Emitter(args.out, "distance", {"a": args.a, "b": args.b})
    if args.format == "json":
        emit.add("distance.json", json.dumps(record, sort_keys=True, indent=2) + "\n")
    else:
        emit.add("distance.txt", f"d({args.a}, {args.b}) = {d}\n")
    emit.flush()
    return 0


def cmd_degree(args) -> int:
    handle = parse_handle(args.handle)
    emit = Emitter(args.out, "degree",
                   {"handle": args.handle, "obs": args.obs,
                    "window": args.window, "level": args.level})
    deg = analysis.degree_of_column(handle, args.obs)
    record = {"handle": handle.to_json(), "degree": str(deg)}
    if args.window is not None:
        if args.level is None:
            raise UsageError("--window needs --level")
        wmin = analysis.degree_window_min(handle, args.level, args.start,
                                          args.window)
        record["window_min"] = {"level": args.level, "start": str(args.start),
                                "window": str(args.window), "min": str(wmin)}
    emit.add("degree.json", json.dumps(record, sort_keys=True, indent=2) + "\n")
    emit.flush()
    return 0


def cmd_lift(args) -> int:
    addr = VertexAddr(args.level, args.cycle, args.pos)
    report = bouquet.lift_choices(addr, args.max)
    record = {"address": str(addr), "total": str(report.total),
              "truncated": report.truncated,
              "choices": [str(c) for c in report.choices]}
    emit = Emitter(args.out, "lift",
                   {"level": args.level, "cycle": args.cycle,
                    "pos": str(args.pos), "max": args.max})
    emit.add("lift.json", json.dumps(record, sort_keys=True, indent=2) + "\n")
    emit.flush()
    return 0


def cmd_proximal(args) -> int:
    rng = random.Random(args.seed)
    spans = [(w * args.window_stride, args.window_len)
             for w in range(args.windows)]
    results = []
    all_ok = True
    for _ in range(args.handles):
        h = dynamics.random_handle(args.spine, rng)
        report = analysis.proximal_certificate(h, args.level, spans)
        all_ok &= report.all_hit
        results.append(report.to_json())
    emit = Emitter(args.out, "proximal",
                   {"level": args.level, "handles": args.handles,
                    "windows": args.windows, "window_len": args.window_len,
                    "spine": args.spine, "seed": args.seed})
    emit.add("proximal.json", json.dumps(
        {"all_hit": all_ok, "reports": results}, sort_keys=True, indent=2) + "\n")
    emit.flush()
    return 0 if all_ok else 1


def cmd_liyorke(args) -> int:
    rng = random.Random(args.seed)
    reports = []
    prox = sep = 0
    for _ in range(args.pairs):
        a, b = dynamics.random_pair(args.spine, rng)
        report = analysis.li_yorke_test(a, b, args.horizon,
                                        args.prox_depth, args.sep_depth)
        prox += report.proximal_witness is not None
        sep += report.separation_witness is not None
        reports.append(report.to_json())
    ok = prox == args.pairs and sep >= args.sep_rate * args.pairs
    summary = {"pairs": args.pairs, "proximal_found": prox,
               "separation_found": sep, "sep_rate_required": args.sep_rate,
               "passed": ok, "seed": args.seed, "horizon": args.horizon,
               "spine": args.spine, "reports": reports}
    emit = Emitter(args.out, "liyorke",
                   {"pairs": args.pairs, "seed": args.seed,
                    "spine": args.spine, "horizon": args.horizon})
    emit.add("liyorke.json", json.dumps(summary, sort_keys=True, indent=2) + "\n")
    emit.flush()
    print(f"proximal {prox}/{args.pairs}, separated {sep}/{args.pairs}",
          file=sys.stderr)
    return 0 if ok else 1


def cmd_mixing_gaps(args) -> int:
    report = analysis.mixing_gap_report(args.m, args.j, args.budget)
    ok = report.prefix_matches and report.suffix_within_bound
    emit = Emitter(args.out, "mixing-gaps",
                   {"m": args.m, "j": args.j, "budget": args.budget})
    emit.add(f"mixing_m{args.m}_j{args.j}.json",
             json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n")
    emit.flush()
    return 0 if ok else 1


def cmd_dsl_check(args) -> int:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc}")
    try:
        doc = dsl.parse(text)
    except dsl.DslSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return 1
    problems = dsl.validate_document(doc)
    emit = Emitter(args.out, "dsl-check",
                   {"file": args.file, "equivalence": args.equivalence})
    record = {"document": doc.name, "mode": doc.mode,
              "levels": len(doc.levels),
              "violations": [str(v) for v in problems]}
    ok = not problems
    if args.equivalence is not None and ok:
        equivalent = dsl.builtin_equivalence(doc, args.equivalence)
        record["builtin_equivalent"] = equivalent
        ok &= equivalent
    if args.json:
        record["parsed"] = dsl.document_json(doc)
    if args.canonical:
        emit.add("canonical.cover", dsl.serialize(doc))
    emit.add("dsl_check.json", json.dumps(record, sort_keys=True, indent=2) + "\n")
    emit.flush()
    return 0 if ok else 1


def cmd_check(args) -> int:
    if args.list:
        for num, (name, _) in sorted(verify.ALL_CHECKS.items()):
            print(f"{num:2d}  {name}")
        return 0
    numbers = None
    if args.which:
        by_name = {name: num for num, (name, _) in verify.ALL_CHECKS.items()}
        numbers = []
        for token in args.which:
            if token.isdigit() and int(token) in verify.ALL_CHECKS:
                numbers.append(int(token))
            elif token in by_name:
                numbers.append(by_name[token])
            else:
                raise UsageError(f"unknown check {token!r} (try --list)")
    results = verify.run_checks(numbers)
    for result in results:
        print(result.line())
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------
# Argument wiring.
# ---------------------------------------------------------------------------

def _add_common(sub, out=True, seed=False, cover=False):
    if out:
        sub.add_argument("--out", help="write artifacts (plus manifest.json) here")
    if seed:
        sub.add_argument("--seed", type=int, default=0)
    if cover:
        sub.add_argument("--cover", help=".cover document instead of the "
                                         "built-in construction")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaoscope",
        description="Exact orbits and chaos-property verification on the "
                    "bouquet-cover Cantor system.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("levels", help="cycle length / k table")
    p.add_argument("--max", type=int, default=3)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--formulas", action="store_true",
                   help="emit full level specs (implies JSON)")
    _add_common(p, cover=True)
    p.set_defaults(func=cmd_levels)

    p = subs.add_parser("validate", help="cover axioms on materializable levels")
    p.add_argument("--max-level", type=int, default=3)
    p.add_argument("--vertex-budget", type=int,
                   default=bouquet.DEFAULT_VERTEX_BUDGET)
    _add_common(p, cover=True)
    p.set_defaults(func=cmd_validate)

    p = subs.add_parser("materialize", help="explicit graph exports")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--dot", action="store_true", help="emit DOT")
    p.add_argument("--vertex-budget", type=int,
                   default=bouquet.DEFAULT_VERTEX_BUDGET)
    _add_common(p, cover=True)
    p.set_defaults(func=cmd_materialize)

    p = subs.add_parser("orbit", help="orbit trace export")
    p.add_argument("--spine", type=int, required=True)
    p.add_argument("--cycle", type=int)
    p.add_argument("--pos", type=int)
    p.add_argument("--base", action="store_true", help="use the fixed point")
    p.add_argument("--obs", type=int, help="observation depth (default: spine)")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    _add_common(p)
    p.set_defaults(func=cmd_orbit)

    p = subs.add_parser("distance", help="metric distance between two handles")
    p.add_argument("--a", required=True, metavar="SPINE:CYCLE:POS[@T]")
    p.add_argument("--b", required=True, metavar="SPINE:CYCLE:POS[@T]")
    p.add_argument("--format", choices=("text", "json"), default="text")
    _add_common(p)
    p.set_defaults(func=cmd_distance)

    p = subs.add_parser("degree", help="degree of a handle's column")
    p.add_argument("--handle", required=True, metavar="SPINE:CYCLE:POS[@T]")
    p.add_argument("--obs", type=int)
    p.add_argument("--level", type=int, help="level for --window")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--window", type=int,
                   help="also report the windowed degree minimum")
    _add_common(p)
    p.set_defaults(func=cmd_degree)

    p = subs.add_parser("lift", help="preimages of an address one level up")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--cycle", type=int, required=True)
    p.add_argument("--pos", type=int, required=True)
    p.add_argument("--max", type=int, default=64)
    _add_common(p)
    p.set_defaults(func=cmd_lift)

    p = subs.add_parser("proximal", help="base-hit certificates in windows")
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--handles", type=int, default=100)
    p.add_argument("--windows", type=int, default=10)
    p.add_argument("--window-len", type=int, default=700)
    p.add_argument("--window-stride", type=int, default=1000)
    p.add_argument("--spine", type=int, default=dynamics.DEFAULT_SPINE_LEVEL)
    _add_common(p, seed=True)
    p.set_defaults(func=cmd_proximal)

    p = subs.add_parser("liyorke", help="proximal + separation scan on pairs")
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--spine", type=int, default=dynamics.DEFAULT_SPINE_LEVEL)
    p.add_argument("--horizon", type=int, default=analysis.DEFAULT_HORIZON)
    p.add_argument("--prox-depth", type=int, default=analysis.DEFAULT_PROX_DEPTH)
    p.add_argument("--sep-depth", type=int, default=analysis.DEFAULT_SEP_DEPTH)
    p.add_argument("--sep-rate", type=float, default=0.9)
    _add_common(p, seed=True)
    p.set_defaults(func=cmd_liyorke)

    p = subs.add_parser("mixing-gaps", help="gap scan across cover levels")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--budget", type=int, default=_default_budget())
    _add_common(p)
    p.set_defaults(func=cmd_mixing_gaps)

    p = subs.add_parser("dsl-check", help="parse and validate a .cover file")
    p.add_argument("file")
    p.add_argument("--equivalence", type=int, metavar="LEVEL",
                   help="also compare against the built-in construction")
    p.add_argument("--canonical", action="store_true",
                   help="emit the canonical form")
    p.add_argument("--json", action="store_true",
                   help="include the parsed document as JSON")
    _add_common(p)
    p.set_defaults(func=cmd_dsl_check)

    p = subs.add_parser("check", help="run acceptance criteria")
    p.add_argument("which", nargs="*",
                   help="criterion numbers or names (default: all)")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SpineExhausted, StructuralError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except dsl.DslSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
