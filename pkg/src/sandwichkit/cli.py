"""``sandwich-kit``: analyse sandwich semigroups of catalog categories.

Exit codes: 0 all checks pass, 1 a theorem check failed, 2 usage error,
3 a budget (size, node or time cap) was exhausted.
"""

import argparse
from dataclasses import asdict, dataclass, field
import hashlib
import json
import os
from pathlib import Path
import sys
import time

from . import __version__
from .category import KINDS, build_category, parse_morphism
from .eggbox import render_dot, render_text
from .errors import BudgetError, PreconditionError, SandwichKitError
from .frame import (ALL_B_LIMIT, RegularFrame, build_frame, frame_eggboxes, hat_analysis,
                    idempotent_fiber, inverse_case, is_sandwich_regular, mi_structure,
                    pullback_check)
from .green import green_category
from .rank import idrank, rank, rank_formula_check, sandwich_rank_check
from .report import _jsonable
from .sandwich import (SandwichSemigroup, green_transfer_check, invertibility_report, p_sets,
                       regular_set)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
CHECKS = ("green", "psets", "pullback", "hat", "fiber", "mi", "inverse", "rank")
FRAME_CHECKS = ("pullback", "hat", "fiber", "mi", "inverse", "rank")
PROFILE_ENV = "SANDWICH_KIT_PROFILE"
PROFILES = {
    "quick": {"elements": 64, "nodes": 20_000, "seconds": 120.0},
    "desk": {"elements": 256, "nodes": 200_000, "seconds": 900.0},
    "thorough": {"elements": 4096, "nodes": 2_000_000, "seconds": 7200.0},
}
BATCH_SUITES = {
    "quick": [("partialmap", [2, 2]), ("fullmap", [2, 2]), ("injpartial", [2, 2]), ("matf2", [1, 2])],
    "desk": [(k, s) for k in KINDS for s in ([1, 2], [2, 2])] + [("fullmap", [2, 3]), ("fullmap", [3, 3])],
}
EGGBOX_CELL_CAP = 400


@dataclass
class RunConfig:
    kind: str
    sizes: list
    i: int | None = None
    j: int | None = None
    a: str | None = None
    checks: list = field(default_factory=lambda: list(CHECKS))
    budgets: dict = field(default_factory=lambda: dict(PROFILES["desk"]))
    out: str | None = None
    dot: str | None = None
    unsafe_sizes: bool = False

    def validate(self):
        if self.kind not in KINDS:
            raise PreconditionError(f"unknown kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if not self.sizes or any(int(s) < 1 for s in self.sizes):
            raise PreconditionError("sizes must be positive integers")
        bad = set(self.checks) - set(CHECKS)
        if bad:
            raise PreconditionError(f"unknown checks: {', '.join(sorted(bad))}")
        if any(v <= 0 for v in self.budgets.values()):
            raise PreconditionError("budgets must be positive")
        k = len(self.sizes)
        for name in ("i", "j"):
            v = getattr(self, name)
            if v is not None and not 0 <= v < k:
                raise PreconditionError(f"--{name} must be an object index below {k}")
        if self.a is not None and (self.i is None or self.j is None):
            raise PreconditionError("--a requires --i and --j")
        if (self.i is None) != (self.j is None):
            raise PreconditionError("--i and --j go together")
        return self

    def key(self):
        """Hashable part of the config; output paths do not change results."""
        return {"kind": self.kind, "sizes": list(self.sizes), "i": self.i, "j": self.j, "a": self.a,
                "checks": sorted(self.checks), "budgets": self.budgets}

    def hash(self):
        return config_hash(self.key())


@dataclass
class RunRecord:
    config_hash: str
    instances: list
    violations: int
    budget_exhausted: bool
    wall_clock: float
    tool_version: str = __version__

    @property
    def exit_code(self):
        if self.violations:
            return EXIT_VIOLATION
        return EXIT_BUDGET if self.budget_exhausted else EXIT_OK

    def to_json(self):
        return _jsonable(asdict(self))


def config_hash(obj):
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def default_budgets():
    name = os.environ.get(PROFILE_ENV, "desk")
    if name not in PROFILES:
        raise PreconditionError(f"{PROFILE_ENV}={name!r} is not one of {', '.join(PROFILES)}")
    return dict(PROFILES[name])


def label(m):
    vals = m.payload
    return "".join(map(str, vals)) if all(v < 10 for v in vals) else ",".join(map(str, vals))


# -- per-instance analysis -----------------------------------------------------

def _frame_reports(sw, checks, budgets):
    reports = {}
    fr, rb = build_frame(sw)
    reports["frame"] = rb
    hat = None
    if "pullback" in checks:
        reports["pullback"] = pullback_check(fr)
    if {"hat", "mi", "rank"} & set(checks):
        hat, rh = hat_analysis(fr)
        if "hat" in checks:
            reports["hat"] = rh
    if "fiber" in checks:
        reports["fiber"] = idempotent_fiber(fr)
    if "mi" in checks:
        reports["mi"] = mi_structure(fr, hat)
    if "inverse" in checks:
        reports["inverse"] = inverse_case(fr)
    if "rank" in checks:
        reports["rank_formulas"] = rank_formula_check(fr, int(budgets["nodes"]), hat)
    # b-dependent checks for the other choices of b
    if len(fr.V) <= ALL_B_LIMIT:
        hb0 = {fr.Pa.elements[x] for x in hat.hb} if hat else None
        for b in fr.V:
            if b == fr.b:
                continue
            other, rep = build_frame(sw, b)
            merged = reports["frame"]
            merged.merge(rep, f"b={b}")
            if "pullback" in checks:
                merged.merge(pullback_check(other), f"b={b}")
            if "fiber" in checks:
                merged.merge(idempotent_fiber(other), f"b={b}")
            if hat is not None:
                h2, rh2 = hat_analysis(other)
                merged.merge(rh2, f"b={b}")
                merged.check({other.Pa.elements[x] for x in h2.hb} == hb0, "Ĥ_b independent of b", b=b)
                if "mi" in checks:
                    merged.merge(mi_structure(other, h2), f"b={b}")
    summary = dict(fr.summary())
    if hat is not None:
        summary.update(r=hat.r, l=hat.l)
    if "mi" in reports:
        summary["mi_dominated"] = reports["mi"].data["mi_dominated"]
    if "inverse" in reports:
        summary["inverse_case"] = reports["inverse"].data["uniquely_sandwich_regular"]
    return reports, summary


def analyze_instance(c, amb, i, j, a, checks, budgets):
    """One sandwich element; returns a JSON-ready dict."""
    sw = SandwichSemigroup(c, i, j, a, ambient=amb)
    rec = {"i": i, "j": j, "a": list(sw.a.payload), "size": len(sw)}
    if len(sw) > budgets["elements"]:
        rec.update(budget=True, reports={}, violations=[], skipped="element cap")
        return rec
    reports = {}
    ps, rep = p_sets(sw)
    if "psets" in checks:
        reports["psets"] = rep
        reports["invertibility"] = invertibility_report(sw, ps)
        reports["regular_set"] = regular_set(sw, ps)[1]
    if "green" in checks:
        reports["green"] = green_transfer_check(sw, ps)
    regular = is_sandwich_regular(sw)
    rec["sandwich_regular"] = regular
    if regular and set(FRAME_CHECKS) & set(checks):
        fr_reports, summary = _frame_reports(sw, checks, budgets)
        reports.update(fr_reports)
        rec["frame"] = summary
    if "rank" in checks:
        reports["sandwich_rank"] = sandwich_rank_check(sw, int(budgets["nodes"]))[0]
    budget = any(r.data.get("budget") for r in reports.values()) or (
        "sandwich_rank" in reports and reports["sandwich_rank"].data["rank"]["value"] == "budget")
    rec["budget"] = bool(budget)
    rec["violations"] = [dict(v, report=name) for name, r in reports.items() for v in r.violations]
    rec["reports"] = {name: {"ok": r.ok, "data": r.data} for name, r in reports.items()}
    return _jsonable(rec)


def instances_for(c, cfg):
    k = c.n_objects
    pairs = [(cfg.i, cfg.j)] if cfg.i is not None else [(i, j) for i in range(k) for j in range(k)]
    for i, j in pairs:
        if not len(c.hom(i, j)):
            continue
        if cfg.a is not None:
            yield i, j, c.index[parse_morphism(c, j, i, cfg.a)]
        else:
            yield from ((i, j, int(p)) for p in c.hom_indices(j, i))


def cmd_analyze(cfg):
    t0 = time.perf_counter()
    c = build_category(cfg.kind, cfg.sizes, unsafe_sizes=cfg.unsafe_sizes)
    amb = green_category(c)
    out, budget = [], False
    for i, j, a in instances_for(c, cfg):
        if time.perf_counter() - t0 > cfg.budgets["seconds"]:
            budget = True
            break
        out.append(analyze_instance(c, amb, i, j, a, cfg.checks, cfg.budgets))
    nviol = sum(len(r["violations"]) for r in out)
    budget = budget or any(r["budget"] for r in out)
    record = RunRecord(cfg.hash(), out, nviol, budget, round(time.perf_counter() - t0, 3))
    if cfg.out:
        Path(cfg.out).write_text(json.dumps({"config": cfg.key(), **record.to_json()}, indent=1,
                                            sort_keys=True))
    if cfg.dot:
        boxes = []
        for i, j, a in instances_for(c, cfg):
            sw = SandwichSemigroup(c, i, j, a, ambient=amb)
            if is_sandwich_regular(sw):
                boxes += _eggbox_pair(sw)
        Path(cfg.dot).write_text(render_dot(boxes, name="analysis"))
    return record


def _eggbox_pair(sw, x=None):
    fr = RegularFrame(sw)
    hat = hat_analysis(fr)[0]
    pos = None if x is None else fr.Pa.position(x)
    left, right = frame_eggboxes(fr, pos, hat)
    if sum(len(r) for r in left.cells) > EGGBOX_CELL_CAP:
        raise BudgetError("D-class too large to lay out")
    lab = sw.category.elements
    tag = f"S_{sw.i}{sw.j}, a={label(sw.a)}"
    relabel = lambda box, S: _relabel(box, S, lab)
    return [(f"P^a D-class ({tag})", relabel(left, fr.Pa)), (f"W D-class ({tag})", relabel(right, fr.W))]


def _relabel(box, S, elements):
    """Positions -> morphism labels (done once so renderers stay generic)."""
    box.cells = [[tuple(label(elements[S.elements[m]]) for m in cell) for cell in row] for row in box.cells]
    return box


def cmd_eggbox(cfg, x_token=None):
    c = build_category(cfg.kind, cfg.sizes, unsafe_sizes=cfg.unsafe_sizes)
    if cfg.i is None or cfg.a is None:
        raise PreconditionError("eggbox needs --i, --j and --a")
    amb = green_category(c)
    i, j = cfg.i, cfg.j
    a = c.index[parse_morphism(c, j, i, cfg.a)]
    sw = SandwichSemigroup(c, i, j, a, ambient=amb)
    if not is_sandwich_regular(sw):
        raise PreconditionError("egg-box pairing needs a sandwich-regular a")
    x = None if x_token is None else c.index[parse_morphism(c, i, j, x_token)]
    boxes = _eggbox_pair(sw, x)
    text = "\n\n".join(f"{title}\n{render_text(box)}" for title, box in boxes)
    dot = render_dot(boxes, name="eggbox")
    if cfg.dot:
        Path(cfg.dot).write_text(dot)
    return text, dot


def cmd_rank(cfg):
    c = build_category(cfg.kind, cfg.sizes, unsafe_sizes=cfg.unsafe_sizes)
    if cfg.i is None or cfg.a is None:
        raise PreconditionError("rank needs --i, --j and --a")
    amb = green_category(c)
    a = c.index[parse_morphism(c, cfg.j, cfg.i, cfg.a)]
    sw = SandwichSemigroup(c, cfg.i, cfg.j, a, ambient=amb)
    nodes = int(cfg.budgets["nodes"])
    rep, res = sandwich_rank_check(sw, nodes)
    out = {"rank_S": res.to_json(), "lower_bound": rep.data["lower_bound"], "violations": rep.violations}
    if is_sandwich_regular(sw):
        fr = RegularFrame(sw)
        out["rank_P"] = rank(fr.Pa, nodes).to_json()
        Ea = fr.Pa.sub(fr.Pa.generated(fr.Pa.idempotents()))
        out["rank_E"] = rank(Ea, nodes).to_json()
        out["idrank_E"] = idrank(Ea, nodes).to_json()
    budget = any(isinstance(v, dict) and v.get("value") == "budget" for v in out.values())
    return _jsonable(out), budget


def read_log(path):
    done = {}
    p = Path(path)
    if p.exists():
        for line in p.read_text().splitlines():
            if line.strip():
                rec = json.loads(line)
                done[rec["hash"]] = rec
    return done


def cmd_batch(suite, checks, budgets, log_path, kinds=None):
    """Run every instance of the suite, appending one line per new instance
    to the JSONL log; instances already logged (by config hash) are skipped."""
    t0 = time.perf_counter()
    done = read_log(log_path)
    in_scope, new, budget = [], 0, False
    with open(log_path, "a") as log:
        for kind, sizes in suite:
            if kinds and kind not in kinds:
                continue
            c = build_category(kind, sizes)
            amb = None
            cfg = RunConfig(kind, sizes, checks=checks, budgets=budgets)
            for i, j, a in instances_for(c, cfg):
                key = {"kind": kind, "sizes": sizes, "i": i, "j": j, "a": list(c.elements[a].payload),
                       "checks": sorted(checks), "budgets": budgets}
                h = config_hash(key)
                in_scope.append(h)
                if h in done:
                    continue
                if time.perf_counter() - t0 > budgets["seconds"]:
                    budget = True
                    continue
                amb = amb or green_category(c)
                res = analyze_instance(c, amb, i, j, a, checks, budgets)
                rec = {"hash": h, "config": key, "result": res, "tool_version": __version__}
                log.write(json.dumps(rec, sort_keys=True) + "\n")
                log.flush()
                done[h] = rec
                new += 1
    recs = [done[h]["result"] for h in in_scope if h in done]
    nviol = sum(len(r["violations"]) for r in recs)
    budget = budget or any(r["budget"] for r in recs)
    return RunRecord(config_hash({"suite": suite, "checks": sorted(checks), "budgets": budgets}),
                     [{"instances": len(in_scope), "new": new}], nviol, budget,
                     round(time.perf_counter() - t0, 3))


# -- argument handling ----------------------------------------------------------

def _int_list(text):
    try:
        return [int(v) for v in text.replace("[", "").replace("]", "").split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser():
    p = argparse.ArgumentParser(prog="sandwich-kit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, need_kind=True):
        sp.add_argument("--config", help="JSON file mirroring RunConfig; flags override it")
        sp.add_argument("--kind", choices=KINDS, required=False)
        sp.add_argument("--sizes", type=_int_list)
        sp.add_argument("--i", type=int)
        sp.add_argument("--j", type=int)
        sp.add_argument("--a", help="local index into S_ji or a comma-separated payload")
        sp.add_argument("--checks", type=lambda s: [c.strip() for c in s.split(",") if c.strip()])
        sp.add_argument("--budget-elements", type=int)
        sp.add_argument("--budget-nodes", type=int)
        sp.add_argument("--budget-seconds", type=float)
        sp.add_argument("--out")
        sp.add_argument("--dot")
        sp.add_argument("--unsafe-sizes", action="store_true")

    common(sub.add_parser("analyze", help="run theorem checks on sandwich elements"))
    eg = sub.add_parser("eggbox", help="paired egg-boxes for P^a and W")
    common(eg)
    eg.add_argument("--x", help="element of S_ij whose D-class to draw (default b)")
    common(sub.add_parser("rank", help="ranks of S_ij^a, P^a and its idempotent-generated part"))
    bt = sub.add_parser("batch", help="run a catalog suite into an append-only JSONL log")
    bt.add_argument("--suite", choices=sorted(BATCH_SUITES), default="desk")
    bt.add_argument("--kind", choices=KINDS, action="append", help="restrict to these kinds")
    bt.add_argument("--checks", type=lambda s: [c.strip() for c in s.split(",") if c.strip()])
    bt.add_argument("--budget-elements", type=int)
    bt.add_argument("--budget-nodes", type=int)
    bt.add_argument("--budget-seconds", type=float)
    bt.add_argument("--out", default="results.jsonl")
    return p


def _budgets(args, base=None):
    b = dict(base or default_budgets())
    for name in ("elements", "nodes", "seconds"):
        v = getattr(args, f"budget_{name}", None)
        if v is not None:
            b[name] = v
    return b


def config_from_args(args):
    data = {}
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text())
    for name in ("kind", "sizes", "i", "j", "a", "checks", "out", "dot"):
        v = getattr(args, name, None)
        if v is not None:
            data[name] = v
    if args.unsafe_sizes:
        data["unsafe_sizes"] = True
    data["budgets"] = _budgets(args, {**default_budgets(), **data.get("budgets", {})})
    if "kind" not in data or "sizes" not in data:
        raise PreconditionError("--kind and --sizes are required (or a --config providing them)")
    if data.get("a") is not None:
        data["a"] = str(data["a"])
    return RunConfig(**data).validate()


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    try:
        if args.command == "batch":
            checks = args.checks or list(CHECKS)
            if set(checks) - set(CHECKS):
                raise PreconditionError(f"unknown checks: {', '.join(sorted(set(checks) - set(CHECKS)))}")
            rec = cmd_batch(BATCH_SUITES[args.suite], checks, _budgets(args), args.out, args.kind)
            info = rec.instances[0]
            print(f"batch {args.suite}: {info['instances']} instances ({info['new']} new), "
                  f"{rec.violations} violations, budget={'exhausted' if rec.budget_exhausted else 'ok'}, "
                  f"{rec.wall_clock}s")
            return rec.exit_code
        cfg = config_from_args(args)
        if args.command == "analyze":
            rec = cmd_analyze(cfg)
            for inst in rec.instances:
                status = "FAIL" if inst["violations"] else ("BUDGET" if inst["budget"] else "ok")
                print(f"S_{inst['i']}{inst['j']} a={inst['a']}: {status}")
                for v in inst["violations"]:
                    print(f"  violation [{v['report']}] {v['clause']}")
            print(f"{len(rec.instances)} instances, {rec.violations} violations, "
                  f"budget={'exhausted' if rec.budget_exhausted else 'ok'}")
            return rec.exit_code
        if args.command == "eggbox":
            text, _ = cmd_eggbox(cfg, args.x)
            print(text)
            return EXIT_OK
        if args.command == "rank":
            out, budget = cmd_rank(cfg)
            print(json.dumps(out, indent=1, sort_keys=True))
            if cfg.out:
                Path(cfg.out).write_text(json.dumps(out, indent=1, sort_keys=True))
            if out["violations"]:
                return EXIT_VIOLATION
            return EXIT_BUDGET if budget else EXIT_OK
    except BudgetError as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (PreconditionError, ValueError, KeyError, OSError, SandwichKitError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
