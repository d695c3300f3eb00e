"""Command line front end.

    sliceball constants [--p P ...] [--json]
    sliceball verify CHECK [--fn SPEC] [options]
    sliceball sweep OBJECTIVE [--start A] [--stop B] [--step H] [--p P]
    sliceball verify-all [--manifest PATH | --replay PATH]

Exit codes: 0 pass, 1 a check failed, 2 usage error or unmet hypothesis.
"""
import argparse
import json
import os
import re
import sys
from dataclasses import asdict, dataclass, field
from typing import List

from . import __version__, verify
from ._accel import apply_thread_cap
from .bounds import (
    SQRT3,
    bergman_constants,
    bergman_covering_objective,
    bergman_injectivity_objective,
    bloch_constants,
    bloch_covering_objective,
    bloch_injectivity_objective,
    bonk_bound,
    extremal_f_alpha,
    growth_bound_bergman,
    growth_bound_bloch,
    landau_radius,
    rotation_covering_constants,
)
from .quaternion import DomainError, Quaternion
from .sampling import SampleConfig
from .series import SliceSeries, identity, mobius, polynomial

CHECKS = ("injective", "covering", "bonk", "lindelof", "rotation", "sharpness", "algebra")
EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- function specs -------------------------------------------------------------

_QTERM = re.compile(r"([+-]?)\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)?\s*([ijk]?)")


def parse_quaternion(text):
    """``"0.3+0.2i-0.1k"``, ``"j"``, ``"0.5"`` or a JSON list ``"[w,x,y,z]"``."""
    s = text.strip()
    if s.startswith("["):
        return Quaternion.from_json(json.loads(s))
    parts = {"": 0.0, "i": 0.0, "j": 0.0, "k": 0.0}
    pos = 0
    s = s.replace(" ", "")
    if not s:
        raise UsageError("empty quaternion literal")
    while pos < len(s):
        m = _QTERM.match(s, pos)
        if not m or m.end() == pos or (m.group(2) is None and not m.group(3)):
            raise UsageError(f"cannot parse quaternion {text!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        mag = float(m.group(2)) if m.group(2) else 1.0
        parts[m.group(3)] += sign * mag
        pos = m.end()
    return Quaternion(parts[""], parts["i"], parts["j"], parts["k"])


def _split_args(text):
    # commas inside [...] belong to a JSON quaternion
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [p for p in (s.strip() for s in out) if p]


@dataclass
class FunctionSpec:
    source: str
    resolved: SliceSeries

    @classmethod
    def parse(cls, source):
        return cls(source, resolve_function(source))


def resolve_function(source):
    """Turn ``--fn`` text into a series.

    Accepted: ``identity``, ``mobius:U[,V]``, ``extremal:ALPHA``,
    ``poly:A0,A1,...`` (quaternion literals), a JSON object with ``coeffs``
    or a bare JSON coefficient list, or a path to a file holding that JSON.
    """
    s = source.strip()
    name, _, arg = s.partition(":")
    try:
        if s == "identity":
            return identity()
        if name == "mobius":
            args = _split_args(arg)
            if not 1 <= len(args) <= 2:
                raise UsageError("mobius takes U or U,V")
            u = parse_quaternion(args[0])
            v = parse_quaternion(args[1]) if len(args) == 2 else Quaternion(1.0)
            if abs(u) >= 1.0:
                raise UsageError(f"mobius needs |u| < 1, got {abs(u):.6g}")
            if abs(abs(v) - 1.0) >= 1e-12:
                raise UsageError(f"mobius needs |v| = 1, got {abs(v):.6g}")
            return mobius(u, v)
        if name == "extremal":
            alpha = float(arg)
            if not 0.0 < alpha < 1.0:
                raise UsageError(f"extremal needs 0 < alpha < 1, got {alpha}")
            return extremal_f_alpha(alpha)
        if name == "poly":
            return polynomial(*[parse_quaternion(a) for a in _split_args(arg)])
        if s.startswith("{") or s.startswith("["):
            data = json.loads(s)
        elif os.path.isfile(s):
            with open(s, encoding="utf-8") as fh:
                data = json.load(fh)
        else:
            raise UsageError(f"unknown function spec {source!r}")
        if isinstance(data, list):
            data = {"coeffs": data}
        return SliceSeries.from_json(data)
    except (ValueError, TypeError, DomainError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad function spec {source!r}: {exc}") from exc


# -- manifest -------------------------------------------------------------------

TOLERANCES = {
    "collision": verify.COLLISION_TOL,
    "cover": verify.COVER_TOL,
    "bonk": verify.BONK_TOL,
    "gate": verify.GATE_TOL,
    "seminorm_slack": verify.SEMINORM_SLACK,
    "lindelof": verify.LINDELOF_TOL,
    "equality": verify.EQUALITY_TOL,
}


@dataclass
class RunManifest:
    argv: List[str]
    seed: int
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCES))
    version: str = __version__
    reports: dict = field(default_factory=dict)

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, data):
        return cls(**data)

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def read(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


# -- constants --------------------------------------------------------------------

def constants_data(p_list, symmetric=True):
    b = bloch_constants()
    out = {
        "r_B": b.injectivity_radius,
        "R_B": b.covering_radius,
        "bergman": [],
        "rotation": dict(zip(("real_case", "rotated_case", "radius"),
                             rotation_covering_constants())),
    }
    for p in p_list:
        pair = bergman_constants(p, symmetric=symmetric)
        out["bergman"].append({"p": p, "r_p": pair.injectivity_radius, "R_p": pair.covering_radius})
    return out


def cmd_constants(args, out):
    for p in args.p:
        if not p >= 1.0:
            raise UsageError(f"p must be >= 1, got {p}")
    data = constants_data(args.p, symmetric=not args.printed)
    if args.json:
        print(json.dumps(data, indent=2), file=out)
        return EXIT_PASS
    print(f"{'constant':<24}{'value':>14}", file=out)
    print(f"{'r_B (Bloch injectivity)':<24}{data['r_B']:>14.7f}", file=out)
    print(f"{'R_B (Bloch covering)':<24}{data['R_B']:>14.7f}", file=out)
    for row in data["bergman"]:
        print(f"{'r_p  p=%g' % row['p']:<24}{row['r_p']:>14.7f}", file=out)
        print(f"{'R_p  p=%g' % row['p']:<24}{row['R_p']:>14.7f}", file=out)
    rot = data["rotation"]
    print(f"{'3 - 2*sqrt(2)':<24}{rot['real_case']:>14.10f}", file=out)
    print(f"{'5 - 2*sqrt(6)':<24}{rot['rotated_case']:>14.10f}", file=out)
    print(f"{'5/2 - sqrt(6)':<24}{rot['radius']:>14.10f}", file=out)
    return EXIT_PASS


# -- verify -----------------------------------------------------------------------

def run_check(check, fn, cfg, alpha=0.6, r=None, R=None, expect_equality=False):
    if check == "injective":
        return verify.check_injective(fn, r if r is not None else 1.0 / SQRT3, cfg)
    if check == "covering":
        return verify.check_covering(fn, r if r is not None else 1.0 / SQRT3,
                                     R if R is not None else SQRT3 / 4.0, cfg)
    if check == "bonk":
        return verify.check_bonk(fn, cfg)
    if check == "lindelof":
        return verify.check_lindelof(fn, cfg, expect_equality=expect_equality)
    if check == "rotation":
        return verify.check_rotation_covering(fn, cfg)
    if check == "sharpness":
        return verify.landau_sharpness(alpha, cfg)
    if check == "algebra":
        return verify.check_algebra(cfg, f=None if fn is None else fn)
    raise UsageError(f"unknown check {check!r}; choose from {', '.join(CHECKS)}")


def _print_report(rep, as_json, out):
    if as_json:
        print(json.dumps(rep.to_json(), indent=2, sort_keys=True), file=out)
        return
    status = "PASS" if rep.passed else "FAIL"
    print(f"{rep.check}: {status}  margin={rep.margin:.6g}  samples={rep.samples_used}", file=out)
    if rep.witness is not None:
        a, b = rep.witness
        print(f"  witness: {list(a)} -> {list(b)}", file=out)
    for k, v in rep.details.items():
        if k != "subchecks":
            print(f"  {k}: {verify._jsonable(v)}", file=out)
    for k, v in rep.details.get("subchecks", {}).items():
        print(f"  [{'x' if v else ' '}] {k}", file=out)


def cmd_verify(args, out):
    cfg = SampleConfig(count=args.count, seed=args.seed)
    if args.check == "sharpness" and not 0.0 < args.alpha < 1.0:
        raise UsageError(f"alpha must lie in (0, 1), got {args.alpha}")
    fn = None
    if args.fn is not None:
        fn = FunctionSpec.parse(args.fn).resolved
    elif args.check not in ("sharpness", "algebra"):
        fn = identity()
    rep = run_check(args.check, fn, cfg, args.alpha, args.r, args.R, args.expect_equality)
    _print_report(rep, args.json, out)
    if args.manifest:
        RunManifest(argv=args.argv, seed=args.seed, reports={args.check: rep.to_json()}).write(args.manifest)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def battery():
    """The fixed ``verify-all`` battery: name, check, function spec, options."""
    r0 = landau_radius(0.6)
    return [
        ("sharpness-0.6", "sharpness", None, {"alpha": 0.6}),
        ("covering-identity", "covering", "identity", {"r": 1.0 / SQRT3, "R": SQRT3 / 4.0}),
        ("covering-extremal-0.6", "covering", "extremal:0.6", {"r": 1.0 / 3.0, "R": 1.0 / 9.0 - 1e-6}),
        ("injective-extremal-0.6", "injective", "extremal:0.6", {"r": 0.99 * r0}),
        ("bonk-identity", "bonk", "identity", {}),
        ("bonk-cubic", "bonk", "poly:0,1,0,-0.3333333333333333", {}),
        ("lindelof-mobius", "lindelof", "mobius:0.3+0.2i-0.1k,0.6j+0.8k", {"expect_equality": True}),
        ("lindelof-square", "lindelof", "poly:0.1,0,0.5", {}),
        ("rotation-quadratic", "rotation", "poly:0,1,0.1j", {}),
        ("algebra", "algebra", None, {}),
    ]


def run_battery(cfg):
    reports = {}
    for name, check, spec, opts in battery():
        fn = resolve_function(spec) if spec else None
        try:
            rep = run_check(check, fn, cfg, **opts)
            reports[name] = rep.to_json()
        except verify.HypothesisNotMet as exc:
            reports[name] = {"check": check, "passed": False, "hypothesis_not_met": str(exc)}
    return reports


def cmd_verify_all(args, out):
    if args.replay:
        old = RunManifest.read(args.replay)
        sub = build_parser().parse_args(old.argv)
        cfg = SampleConfig(count=sub.count, seed=sub.seed)
        new = run_battery(cfg)
        same = new == old.reports
        for name in old.reports:
            ok = new.get(name) == old.reports[name]
            print(f"{'same' if ok else 'DIFF'}  {name}", file=out)
        print("replay identical" if same else "replay differs", file=out)
        return EXIT_PASS if same else EXIT_FAIL
    cfg = SampleConfig(count=args.count, seed=args.seed)
    reports = run_battery(cfg)
    for name, rep in reports.items():
        status = "PASS" if rep["passed"] else "FAIL"
        extra = f"margin={rep['margin']:.3g}" if "margin" in rep else rep.get("hypothesis_not_met", "")
        print(f"{status}  {name:<26}{extra}", file=out)
    if args.manifest:
        RunManifest(argv=args.argv, seed=args.seed, reports=reports).write(args.manifest)
    return EXIT_PASS if all(r["passed"] for r in reports.values()) else EXIT_FAIL


# -- sweep --------------------------------------------------------------------------

def _objectives(p):
    # name -> (function of r, lower end, upper end, lower end included)
    return {
        "bloch-r": (bloch_injectivity_objective, 0.0, 1.0, False),
        "bloch-R": (bloch_covering_objective, 0.0, 1.0, False),
        "bergman-r": (lambda r: bergman_injectivity_objective(r, p), 0.0, 1.0, False),
        "bergman-R": (lambda r: bergman_covering_objective(r, p, symmetric=True), 0.0, 1.0, False),
        "bonk": (bonk_bound, 0.0, 1.0 / SQRT3, True),
        "growth-bloch": (growth_bound_bloch, 0.0, 1.0, True),
        "growth-bergman": (lambda r: growth_bound_bergman(r, p), 0.0, 1.0, True),
    }


SWEEPS = tuple(_objectives(2.0))


def sweep_rows(objective, start=None, stop=None, step=0.01, p=2.0):
    if p < 1.0:
        raise UsageError(f"p must be >= 1, got {p}")
    if not step > 0.0:
        raise UsageError(f"step must be positive, got {step}")
    func, lo, hi, closed = _objectives(p)[objective]
    start = lo if start is None else start
    stop = hi if stop is None else stop
    rows = []
    k = 0
    while True:
        r = round(start + k * step, 12)
        k += 1
        if r >= stop - 1e-12 or r >= hi:
            break
        if r < lo or (r == lo and not closed):
            continue
        rows.append((r, func(r)))
    if not rows:
        raise UsageError(f"empty range [{start}, {stop}) for {objective}")
    return rows


def cmd_sweep(args, out):
    rows = sweep_rows(args.objective, args.start, args.stop, args.step, args.p)
    params = f"step={args.step!r}"
    if args.objective.startswith(("bergman", "growth-bergman")):
        params += f" p={args.p!r}"
    print(f"# {args.objective} {params}", file=out)
    print("r,value", file=out)
    for r, v in rows:
        # repr is locale independent and round-trips
        print(f"{r!r},{float(v)!r}", file=out)
    return EXIT_PASS


# -- parser ------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="sliceball", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", help="print the radius constants")
    c.add_argument("--p", type=float, nargs="+", default=[], help="Bergman exponents")
    c.add_argument("--json", action="store_true")
    c.add_argument("--printed", action="store_true",
                   help="use the unsymmetrised Bergman covering objective")
    c.set_defaults(run=cmd_constants)

    def sampling(p):
        p.add_argument("--count", type=int, default=100_000)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--manifest", help="write a run manifest to this path")

    v = sub.add_parser("verify", help="run one check")
    v.add_argument("check", choices=CHECKS)
    v.add_argument("--fn", help="function spec (see resolve_function)")
    v.add_argument("--alpha", type=float, default=0.6)
    v.add_argument("--r", type=float)
    v.add_argument("--R", type=float)
    v.add_argument("--expect-equality", action="store_true")
    v.add_argument("--json", action="store_true")
    sampling(v)
    v.set_defaults(run=cmd_verify)

    s = sub.add_parser("sweep", help="CSV of an objective or bound on a grid")
    s.add_argument("objective", choices=SWEEPS)
    s.add_argument("--start", type=float)
    s.add_argument("--stop", type=float)
    s.add_argument("--step", type=float, default=0.01)
    s.add_argument("--p", type=float, default=2.0)
    s.set_defaults(run=cmd_sweep)

    a = sub.add_parser("verify-all", help="run the standard battery")
    sampling(a)
    a.add_argument("--replay", help="re-run a manifest and compare reports")
    a.set_defaults(run=cmd_verify_all)
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    args.argv = argv
    apply_thread_cap()
    try:
        if getattr(args, "count", 2) < 2:
            raise UsageError("--count must be >= 2")
        return args.run(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except verify.HypothesisNotMet as exc:
        print(f"hypothesis not met: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
