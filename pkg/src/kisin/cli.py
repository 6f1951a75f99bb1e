"""Command-line front end.

    kisin standard    --standard p=2,n=1,s=1
    kisin fixed-point --standard p=2,n=1,s=1
    kisin member      --config cfg.json --point point.json
    kisin enumerate   --config cfg.json --out points.json
    kisin graph       --points points.json --rules single,chi,mq --out graph.json --dot graph.dot
    kisin check       {schubert,fiber,chi,fixpoint,battery} --seed 7

Exit codes: 0 success, 1 verification failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import checks
from .errors import ConfigError, EmptyDetClass, KisinError
from .gf import GF, field
from .phimod import PhiModule, fixed_point, is_simple, standard_module
from .series import DEFAULT_PREC, frac_str
from .variety import Cochar, KisinPoint, enumerate_points, is_member, radius_bound

CONFIG_KEYS = {"field", "module", "nu", "prec", "radius_slack", "rules", "seed", "jobs", "out", "dot"}
STANDARD_KEYS = {"p", "m", "m_ext", "n", "s", "alpha"}
SUITES = ("schubert", "fiber", "chi", "fixpoint", "battery")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def emit(obj, out: str | None):
    text = dumps(obj)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- config ----------------------------------------------------------------------

def _int(key, value) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def parse_standard(text: str) -> dict:
    out = {}
    for part in filter(None, (t.strip() for t in text.split(","))):
        if "=" not in part:
            raise ConfigError(f"standard: expected key=value, got {part!r}")
        k, v = (t.strip() for t in part.split("=", 1))
        if k not in STANDARD_KEYS:
            raise ConfigError(f"standard: unknown key {k!r}")
        out[k] = _int(f"standard.{k}", v)
    for k in ("p", "n", "s"):
        if k not in out:
            raise ConfigError(f"standard: missing key {k!r}")
    return out


def parse_nu(text: str) -> list:
    pairs = []
    for part in filter(None, (t.strip() for t in text.split(";"))):
        ab = part.split(",")
        if len(ab) != 2:
            raise ConfigError(f"nu: expected 'a,b', got {part!r}")
        pairs.append([_int("nu", ab[0]), _int("nu", ab[1])])
    return pairs


def parse_field(text: str) -> dict:
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise ConfigError(f"field: expected 'p,m', got {text!r}")
    return {"p": _int("field.p", parts[0]), "m": _int("field.m", parts[1]) if len(parts) == 2 else 1}


def build_field(spec) -> GF:
    if not isinstance(spec, dict):
        raise ConfigError("field: expected an object")
    bad = set(spec) - {"p", "m", "modulus"}
    if bad:
        raise ConfigError(f"field: unknown key {sorted(bad)[0]!r}")
    try:
        return field(_int("field.p", spec["p"]), _int("field.m", spec.get("m", 1)), spec.get("modulus"))
    except KeyError:
        raise ConfigError("field: missing key 'p'") from None
    except ValueError as e:
        raise ConfigError(f"field: {e}") from None


def build_module(spec, F: GF | None) -> PhiModule:
    if not isinstance(spec, dict):
        raise ConfigError("module: expected an object")
    if "A" in spec:
        bad = set(spec) - {"p", "m_ext", "n", "A"}
        if bad:
            raise ConfigError(f"module: unknown key {sorted(bad)[0]!r}")
        if F is not None and spec.get("p", F.p) != F.p:
            raise ConfigError("module.p disagrees with field.p")
        try:
            return PhiModule.from_json(spec, F)
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"module: {e}") from None
    std = spec.get("standard", spec)
    if not isinstance(std, dict):
        raise ConfigError("module.standard: expected an object")
    bad = set(std) - STANDARD_KEYS
    if bad:
        raise ConfigError(f"module: unknown key {sorted(bad)[0]!r}")
    for k in ("p", "n", "s"):
        if k not in std:
            raise ConfigError(f"module: missing key {k!r}")
    p = _int("module.p", std["p"])
    m = _int("module.m", std.get("m", std.get("m_ext", F.m if F is not None else 1)))
    if F is not None and (F.p, F.m) != (p, m):
        raise ConfigError("module parameters disagree with field")
    try:
        return standard_module(p, m, _int("module.n", std["n"]), _int("module.s", std["s"]), std.get("alpha", 1))
    except ValueError as e:
        raise ConfigError(f"module: {e}") from None


class RunConfig:
    """Validated run parameters; command-line flags override the config file."""

    def __init__(self, data: dict):
        bad = set(data) - CONFIG_KEYS
        if bad:
            raise ConfigError(f"unknown config key {sorted(bad)[0]!r}")
        self.raw = data
        self.field = build_field(data["field"]) if "field" in data else None
        self.module = build_module(data["module"], self.field) if "module" in data else None
        if self.module is not None and self.field is None:
            self.field = self.module.field
        self.nu = None
        if "nu" in data:
            try:
                self.nu = Cochar(data["nu"])
            except (TypeError, ValueError) as e:
                raise ConfigError(f"nu: {e}") from None
            if self.module is not None and self.nu.n != self.module.n:
                raise ConfigError(f"nu: {self.nu.n} pairs for a module with {self.module.n} factors")
        self.prec = _int("prec", data.get("prec", DEFAULT_PREC))
        self.radius_slack = _int("radius_slack", data.get("radius_slack", 0))
        if self.radius_slack < 0:
            raise ConfigError("radius_slack: must be nonnegative")
        self.rules = data.get("rules", ["single", "chi", "mq"])
        self.seed = _int("seed", data.get("seed", 0))
        self.jobs = _int("jobs", data.get("jobs", 1))
        self.out = data.get("out")
        self.dot = data.get("dot")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        data = {}
        if getattr(args, "config", None):
            try:
                data = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigError(f"config: {e}") from None
            if not isinstance(data, dict):
                raise ConfigError("config: expected a JSON object")
        data = dict(data)
        if getattr(args, "field", None):
            data["field"] = parse_field(args.field)
        if getattr(args, "standard", None):
            data["module"] = {"standard": parse_standard(args.standard)}
            if "field" in data:
                std = data["module"]["standard"]
                std.setdefault("m", data["field"].get("m", 1))
        if getattr(args, "nu", None):
            data["nu"] = parse_nu(args.nu)
        for key in ("prec", "seed", "jobs", "out", "dot"):
            value = getattr(args, key, None)
            if value is not None:
                data[key] = value
        if getattr(args, "rules", None):
            data["rules"] = [r.strip() for r in args.rules.split(",") if r.strip()]
        return cls(data)

    def need_module(self) -> PhiModule:
        if self.module is None:
            raise ConfigError("module: required (use --config or --standard)")
        return self.module

    def need_nu(self) -> Cochar:
        if self.nu is None:
            raise ConfigError("nu: required (use --config or --nu)")
        return self.nu


# -- golden store ------------------------------------------------------------------

def golden_dir() -> Path:
    env = os.environ.get("KISIN_GOLDEN_DIR")
    if env:
        return Path(env)
    repo = Path(__file__).resolve().parents[2] / "golden"
    return repo if repo.is_dir() else Path.cwd() / "golden"


GOLDEN_FILE = "enumeration_counts.json"


def golden_instances():
    from .battery import Instance, enumeration_battery

    out = [Instance(2, 1, 1, 1, Cochar([(2, -1)]))]
    out.extend(enumeration_battery())
    return out


def regenerate_goldens(path: Path) -> dict:
    """Counts from the window oracle, with the generating configuration."""
    from .oracles import window_oracle
    from .variety import solve_det_classes

    entries = []
    for inst in golden_instances():
        M = inst.module()
        s = solve_det_classes(M, inst.nu)
        pts = window_oracle(M, inst.nu, s, fixed_point(M), radius_bound(M, inst.nu))
        entries.append({"config": inst.to_json(), "count": len(pts)})
    data = {"generator": "window oracle", "entries": entries}
    path.mkdir(parents=True, exist_ok=True)
    (path / GOLDEN_FILE).write_text(dumps(data))
    return data


def check_goldens(path: Path) -> checks.CheckResult:
    from .battery import Instance

    res = checks.CheckResult("golden counts")
    f = path / GOLDEN_FILE
    if not f.exists():
        res.notes.append(f"no golden store at {f}; skipped")
        return res
    t0 = time.perf_counter()
    data = json.loads(f.read_text())
    for e in data["entries"]:
        c = e["config"]
        inst = Instance(c["p"], c["m_ext"], c["n"], c["s"], Cochar(c["nu"]))
        got = len(enumerate_points(inst.module(), inst.nu).points)
        res.cases += 1
        if got != e["count"]:
            res.fail(f"{inst.label()}: {got} vs golden {e['count']}")
    res.seconds = time.perf_counter() - t0
    return res


# -- commands ------------------------------------------------------------------------

def cmd_standard(args, cfg: RunConfig) -> int:
    M = cfg.need_module()
    verdict = is_simple(M, cfg.prec)
    emit({"module": M.to_json(), "field": M.field.to_json(), "simple": type(verdict).__name__}, cfg.out)
    return 0


def cmd_fixed_point(args, cfg: RunConfig) -> int:
    M = cfg.need_module()
    emit(fixed_point(M).to_json(), cfg.out)
    return 0


def _load_points(path: str, F):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"points: {e}") from None
    rows = data["points"] if isinstance(data, dict) else [data]
    return data, [KisinPoint.from_json(F, row) for row in rows]


def cmd_member(args, cfg: RunConfig) -> int:
    M, nu = cfg.need_module(), cfg.need_nu()
    if not args.point:
        raise ConfigError("point: required (use --point)")
    _, pts = _load_points(args.point, M.field)
    results = []
    for x in pts:
        if len(x) != M.n:
            raise ConfigError(f"point: {len(x)} lattices for a module with {M.n} factors")
        r = is_member(M, nu, x)
        if r:
            results.append({"member": True, "profile": [list(ab) for ab in r.profile]})
        else:
            results.append({"member": False, "reason": r.reason})
    emit(results[0] if len(results) == 1 else results, cfg.out)
    return 0 if all(r["member"] for r in results) else 1


def cmd_enumerate(args, cfg: RunConfig) -> int:
    M, nu = cfg.need_module(), cfg.need_nu()
    header = {"field": M.field.to_json(), "module": M.to_json(), "nu": nu.to_json()}
    try:
        E = enumerate_points(M, nu, slack=cfg.radius_slack, jobs=max(cfg.jobs, 1))
        out = E.to_json()
    except EmptyDetClass:
        out = {"s": None, "R": [frac_str(x) for x in radius_bound(M, nu)], "points": [], "count": 0}
    out.update(header)
    emit(out, cfg.out)
    return 0


def cmd_graph(args, cfg: RunConfig) -> int:
    from .connect import RULES, build_graph, components

    if not args.points:
        raise ConfigError("points: required (use --points)")
    try:
        data = json.loads(Path(args.points).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"points: {e}") from None
    if not isinstance(data, dict) or not {"module", "nu", "points"} <= set(data):
        raise ConfigError("points: expected the output of 'kisin enumerate'")
    F = GF.from_json(data["field"]) if "field" in data else None
    M = PhiModule.from_json(data["module"], F)
    nu = Cochar(data["nu"])
    bad = set(cfg.rules) - set(RULES)
    if bad:
        raise ConfigError(f"rules: unknown rule {sorted(bad)[0]!r}")
    pts = [KisinPoint.from_json(M.field, row) for row in data["points"]]
    g = build_graph(pts, M, nu, rules=cfg.rules)
    comps = components(g)
    emit(g.to_json(comps), cfg.out)
    if cfg.dot:
        Path(cfg.dot).write_text(g.to_dot())
    return 0


def run_suite(name: str, seed: int, full: bool = False) -> list[checks.CheckResult]:
    if name == "schubert":
        return [checks.check_schubert(seed)]
    if name == "fiber":
        return [checks.check_fiber(seed)]
    if name == "chi":
        return [checks.check_chi(seed)]
    if name == "fixpoint":
        return [checks.check_fixpoint(seed)]
    return [
        checks.check_fixpoint(seed),
        checks.check_schubert(seed),
        checks.check_fiber(seed, count=100),
        checks.check_chi(seed),
        checks.check_enumeration(full=full),
        checks.check_structure(),
        checks.check_connectivity(),
    ]


def cmd_check(args, cfg: RunConfig) -> int:
    gdir = golden_dir()
    results = run_suite(args.suite, cfg.seed, full=args.full)
    if args.suite == "battery":
        if args.regenerate_goldens:
            regenerate_goldens(gdir)
        results.append(check_goldens(gdir))
    print(f"{'':6}{'suite':<28} {'cases':>12}  {'time':>8}")
    for r in results:
        print(r.line())
        for msg in r.failures[:10]:
            print(f"        - {msg}")
        for note in r.notes:
            print(f"        . {note}")
    ok = all(r.passed for r in results)
    print(f"{'PASS' if ok else 'FAIL'}: {sum(r.passed for r in results)}/{len(results)} suites")
    if cfg.out:
        Path(cfg.out).write_text(
            dumps(
                {
                    "seed": cfg.seed,
                    "suites": [
                        {"name": r.name, "cases": r.cases, "passed": r.passed, "failures": r.failures, "notes": r.notes}
                        for r in results
                    ],
                }
            )
        )
    return 0 if ok else 1


COMMANDS = {
    "standard": cmd_standard,
    "fixed-point": cmd_fixed_point,
    "member": cmd_member,
    "enumerate": cmd_enumerate,
    "graph": cmd_graph,
    "check": cmd_check,
}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="write JSON output here instead of stdout")
    common.add_argument("--field", help="p,m for F_{p^m}")
    common.add_argument("--standard", help="standard module, e.g. p=2,n=1,s=1,alpha=1")
    common.add_argument("--nu", help='cocharacter, e.g. "2,-1;1,0"')
    common.add_argument("--prec", type=int)
    common.add_argument("--jobs", type=int)
    common.add_argument("--seed", type=int)

    parser = argparse.ArgumentParser(prog="kisin", description="Kisin varieties of rank-2 phi-modules")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("standard", parents=[common], help="print a standard module")
    sub.add_parser("fixed-point", parents=[common], help="the Phi-bar fixed point")
    p = sub.add_parser("member", parents=[common], help="test membership of a lattice tuple")
    p.add_argument("--point", help="JSON point, or an enumeration file")
    sub.add_parser("enumerate", parents=[common], help="enumerate F_q-points")
    p = sub.add_parser("graph", parents=[common], help="certificate graph on enumerated points")
    p.add_argument("--points", help="output of 'kisin enumerate'")
    p.add_argument("--rules", help="comma-separated subset of single,chi,mq")
    p.add_argument("--dot", help="also write a DOT file")
    p = sub.add_parser("check", parents=[common], help="self-contained verification suites")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--full", action="store_true", help="full enumeration battery (slow)")
    p.add_argument("--regenerate-goldens", action="store_true", help="rewrite the golden store first")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        cfg = RunConfig.from_args(args)
        return COMMANDS[args.command](args, cfg)
    except ConfigError as e:
        print(f"kisin: error: {e}", file=sys.stderr)
        return 2
    except KisinError as e:
        print(f"kisin: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
