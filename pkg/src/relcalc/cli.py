"""Command-line front end.

Every subcommand writes one JSON report (``--out`` or stdout) with sorted
keys and no timestamps.  Exit codes: 0 success, 1 domain error (the report
is then a structured error object), 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .calculus import (
    WindowError,
    calculus_tower,
    compare_towers,
    cross_effect,
    degree_at_most,
    finite_class,
    parse_expr,
    splitting_check,
    tabulate,
)
from .exactlin import FgAbGroup, IntMatrix, hom_group, smith, tensor_group
from .relres import ProjectiveClass, approx_complex, tower
from .sitecat import (
    CategoryError,
    gamma_window,
    nat_hom,
    representable,
    validate_category,
    yoneda_witness,
)

log = logging.getLogger("relcalc")

THREADS_ENV = "RELCALC_THREADS"


class DomainError(Exception):
    def __init__(self, kind: str, message: str, **extra):
        super().__init__(message)
        self.kind = kind
        self.extra = extra


class UsageError(Exception):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _cf(G: FgAbGroup) -> dict:
    return G.canonical_json()


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise UsageError(f"malformed JSON in {path}: {e}")


def _functor(text: str):
    try:
        return parse_expr(text)
    except (ValueError, OSError, KeyError) as e:
        if isinstance(e, WindowError):
            raise
        raise UsageError(f"bad functor expression {text!r}: {e}")


def _input_files(params: dict) -> dict:
    """Contents of files referenced by ``tab(...)`` so the digest covers them."""
    out = {}
    text = params.get("functor") or ""
    start = 0
    while True:
        i = text.find("tab(", start)
        if i < 0:
            break
        j = text.find(")", i)
        path = text[i + 4:j]
        try:
            with open(path, "rb") as fh:
                out[path] = hashlib.sha256(fh.read()).hexdigest()
        except OSError:
            pass
        start = j + 1
    return out


# ---------------------------------------------------------------------------
# commands: each takes normalized parameters and returns (result, validity)


def cmd_smith(p):
    M = IntMatrix.from_rows(p["matrix"]) if p["matrix"] else IntMatrix(0, 0)
    f = smith(M)
    return {
        "S": f.S.to_rows(),
        "U": f.U.to_rows(),
        "V": f.V.to_rows(),
        "invariant_factors": [d for d in f.diagonal if d],
        "rank": f.rank,
        "cokernel": _cf(FgAbGroup(M.rows, M)),
    }, {}


def cmd_homgroup(p):
    G, H = FgAbGroup.parse(p["source"]), FgAbGroup.parse(p["target"])
    hg, basis = hom_group(G, H)
    return {
        "hom": _cf(hg),
        "hom_generators": len(basis),
        "tensor": _cf(tensor_group(G, H)),
    }, {}


def cmd_validate_window(p):
    C = gamma_window(p["window"])
    rep = validate_category(C)
    out = {"category": C.name, "ok": rep.ok, "violations": rep.violations, "morphisms": len(C.morphisms())}
    if p.get("functor"):
        F = tabulate(_functor(p["functor"]), p["window"], C)
        fr = F.validate(exhaustive=True)
        out["functor"] = {"name": F.name, "ok": fr.ok, "violations": fr.violations}
    return out, {"window": p["window"]}


def cmd_yoneda(p):
    N = p["window"]
    C = gamma_window(N)
    T = _functor(p["functor"])
    F = tabulate(T, N, C)
    rows = []
    for a in range(1, N + 1):
        w = yoneda_witness(C, a, F)
        rows.append({
            "object": a,
            "nat_hom": _cf(nat_hom(representable(C, a), F).group),
            "value": _cf(F.value(a)),
            "round_trip": w.round_trips(),
        })
    ok = all(r["round_trip"] and r["nat_hom"] == r["value"] for r in rows)
    return {"functor": T.text(), "rows": rows, "ok": ok}, {"window": N}


def cmd_crosseffect(p):
    T = _functor(p["functor"])
    r = cross_effect(T, p["tuple"], p["window"])
    ok, whole, parts = splitting_check(T, p["tuple"], p["window"])
    return {
        "functor": T.text(),
        "tuple": list(r.sizes),
        "group": _cf(r.group),
        "splitting_identity": ok,
    }, {"window": p["window"]}


def cmd_degree(p):
    T = _functor(p["functor"])
    v = degree_at_most(T, p["n"], p["window"])
    res = v.to_json()
    res["functor"] = T.text()
    if T.degree() is not None:
        res["symbolic_degree"] = T.degree()
    return res, {"window": p["window"], "coverage": "window tuples only"}


def _class(p, C):
    if p.get("class_file"):
        return ProjectiveClass.from_json(C, _load_json(p["class_file"]))
    return finite_class(p["n"], p["window"], C)


def cmd_resolve(p):
    N = p["window"]
    C = gamma_window(N)
    T = _functor(p["functor"])
    F = tabulate(T, N, C)
    cls = _class(p, C)
    ax = approx_complex(F, cls, p["depth"])
    points = p.get("points") or list(range(N + 1))
    for x in points:
        if x > N:
            raise WindowError(f"point [{x}] outside Γ_{N}", x)
    res = ax.report(points)
    res["functor"] = T.text()
    res["class"] = cls.to_json()
    res["terms"] = [len(X.members) for X in ax.resolution.terms]
    res["certificate"] = ax.resolution.is_certified()
    return res, {"window": N, "depth": p["depth"], "valid_degrees": [0, p["depth"] - 1]}


def cmd_tower(p):
    N, depth, x, max_n = p["window"], p["depth"], p["point"], p["max_n"]
    C = gamma_window(N)
    T = _functor(p["functor"])
    if x > N:
        raise WindowError(f"point [{x}] outside Γ_{N}", x)
    F = tabulate(T, N, C)
    classes = [finite_class(n, N, C) for n in range(1, max_n + 1)]
    classes = [c for c in classes if len(c)]

    def relative():
        tw = tower(F, classes, depth)
        rep = tw.report([x])
        rep["quotient_maps_surjective"] = [tw.quotient_map(k).is_epi() for k in range(len(classes) - 1)]
        rep["lifts_commute"] = [lift.commutes(x) for lift in tw.lifts]
        return rep

    def cotriple():
        return calculus_tower(T, x, max_n, depth).to_json()

    jobs = [relative, cotriple]
    if threads() > 1:
        with ThreadPoolExecutor(max_workers=threads()) as ex:
            rel, cot = [f.result() for f in [ex.submit(j) for j in jobs]]
    else:
        rel, cot = relative(), cotriple()
    return {"functor": T.text(), "relative": rel, "cotriple": cot}, {
        "window": N,
        "depth": depth,
        "valid_degrees": [0, depth - 1],
    }


def cmd_compare(p):
    T = _functor(p["functor"])
    r = compare_towers(T, p["n"], p["window"], p["depth"], p["point"])
    return r.to_json(), {"window": p["window"], "depth": p["depth"], "valid_degrees": [0, p["depth"] - 1]}


def _drop_seconds(obj):
    if isinstance(obj, dict):
        return {k: _drop_seconds(v) for k, v in obj.items() if k != "seconds"}
    if isinstance(obj, list):
        return [_drop_seconds(v) for v in obj]
    return obj


def cmd_suite(p):
    from .acceptance import run_all

    results = run_all(quick=p.get("quick", False), golden_dir=p.get("golden_dir"), regen=p.get("regen_golden", False))
    matrix = {name: ok for name, ok, _ in results}
    # per-criterion timings would break byte-identity; --timing adds the total instead
    details = {name: _drop_seconds(det) for name, _, det in results}
    return {"passed": all(matrix.values()), "matrix": matrix, "details": details}, {}


COMMANDS = {
    "smith": cmd_smith,
    "homgroup": cmd_homgroup,
    "validate": None,  # dispatched separately
    "yoneda-check": cmd_yoneda,
    "crosseffect": cmd_crosseffect,
    "degree": cmd_degree,
    "resolve": cmd_resolve,
    "tower": cmd_tower,
    "compare-towers": cmd_compare,
    "suite": cmd_suite,
}


def make_report(command: str, params: dict, result, validity) -> dict:
    return {
        "tool": "relcalc",
        "version": __version__,
        "command": command,
        "parameters": params,
        "input_digest": digest({"parameters": params, "files": _input_files(params)}),
        "result": result,
        "validity": validity,
        "payload_digest": digest(result),
    }


def validate_report(obj: dict, recompute: bool = True) -> dict:
    """Structural and digest checks of a report, optionally re-running the command."""
    problems = []
    for key in ("tool", "version", "command", "parameters", "result", "payload_digest"):
        if key not in obj:
            problems.append(f"missing key {key!r}")
    if problems:
        return {"ok": False, "problems": problems}
    if obj["tool"] != "relcalc":
        problems.append("not a relcalc report")
    if digest(obj["result"]) != obj["payload_digest"]:
        problems.append("payload digest mismatch")
    cmd = obj["command"]
    fn = COMMANDS.get(cmd)
    out = {"command": cmd, "digest_ok": "payload digest mismatch" not in problems}
    if recompute and fn is not None and cmd != "suite":
        result, _ = fn(obj["parameters"])
        same = digest(result) == obj["payload_digest"]
        out["recomputed_equal"] = same
        if not same:
            problems.append("recomputed result differs")
    out["ok"] = not problems
    out["problems"] = problems
    return out


def cmd_validate(p):
    if p.get("input"):
        obj = _load_json(p["input"])
        if isinstance(obj, dict) and obj.get("tool") == "relcalc":
            return validate_report(obj, recompute=not p.get("no_recompute")), {}
        if isinstance(obj, dict) and "values" in obj and "maps" in obj:
            from .calculus import load_tabulated

            tab = load_tabulated(p["input"])
            rep = tab.functor.validate(exhaustive=True)
            return {"kind": "functor_table", "ok": rep.ok, "violations": rep.violations}, {"window": tab.N}
        if isinstance(obj, dict) and "members" in obj:
            C = gamma_window(obj.get("window", p.get("window") or 3))
            cls = ProjectiveClass.from_json(C, obj)
            return {"kind": "class", "ok": True, "members": [m.label for m in cls]}, {"window": C.N}
        raise DomainError("unrecognized_input", f"{p['input']} is neither a report, a functor table nor a class")
    if not p.get("window"):
        raise UsageError("validate needs --input or --window")
    return cmd_validate_window(p)


COMMANDS["validate"] = cmd_validate


# ---------------------------------------------------------------------------
# argument parsing


def _tuple(text: str) -> list:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tuple {text!r}")
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("tuple entries must be positive integers")
    return vals


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _pos(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="relcalc", description="Relative homological algebra and functor calculus")
    ap.add_argument("--version", action="version", version=f"relcalc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("-v", "--verbose", action="count", default=0)
        sp.add_argument("--timing", action="store_true", help="add a wall-clock field (breaks byte-identity)")

    sp = sub.add_parser("smith", help="Smith normal form of an integer matrix")
    sp.add_argument("--matrix", help='JSON rows, e.g. "[[2,4],[6,8]]"')
    sp.add_argument("--input", help="JSON file with a list of rows")
    common(sp)

    sp = sub.add_parser("homgroup", help="Hom and tensor of two groups")
    sp.add_argument("--source", required=True, help='e.g. "Z/4" or "Z^2+Z/6"')
    sp.add_argument("--target", required=True)
    common(sp)

    sp = sub.add_parser("validate", help="check a report, functor table, class or window category")
    sp.add_argument("--input")
    sp.add_argument("--window", type=_nonneg)
    sp.add_argument("--functor")
    sp.add_argument("--no-recompute", action="store_true")
    common(sp)

    sp = sub.add_parser("yoneda-check", help="nat_hom(h_a, F) against F(a) on a window")
    sp.add_argument("--functor", required=True)
    sp.add_argument("--window", type=_pos, required=True)
    common(sp)

    sp = sub.add_parser("crosseffect", help="cross-effect of a functor at a tuple")
    sp.add_argument("--functor", required=True)
    sp.add_argument("--tuple", type=_tuple, required=True)
    sp.add_argument("--window", type=_pos, required=True)
    common(sp)

    sp = sub.add_parser("degree", help="is the functor of degree <= n on the window")
    sp.add_argument("--functor", required=True)
    sp.add_argument("--n", type=_nonneg, required=True)
    sp.add_argument("--window", type=_pos, required=True)
    common(sp)

    sp = sub.add_parser("resolve", help="relative resolution and approximation homology")
    sp.add_argument("--functor", required=True)
    sp.add_argument("--n", type=_nonneg, default=1, help="class of tensors of length > n")
    sp.add_argument("--class-file", help="JSON class description (overrides --n)")
    sp.add_argument("--window", type=_pos, required=True)
    sp.add_argument("--depth", type=_pos, default=2)
    sp.add_argument("--point", type=_nonneg, action="append", dest="points")
    common(sp)

    sp = sub.add_parser("tower", help="both towers at a point")
    sp.add_argument("--functor", required=True)
    sp.add_argument("--max-n", type=_pos, default=2)
    sp.add_argument("--window", type=_pos, required=True)
    sp.add_argument("--depth", type=_pos, default=2)
    sp.add_argument("--point", type=_nonneg, default=1)
    common(sp)

    sp = sub.add_parser("compare-towers", help="finite-window tower against the cotriple tower")
    sp.add_argument("--functor", required=True)
    sp.add_argument("--n", type=_nonneg, required=True)
    sp.add_argument("--window", type=_pos, required=True)
    sp.add_argument("--depth", type=_pos, default=2)
    sp.add_argument("--point", type=_nonneg, default=1)
    common(sp)

    sp = sub.add_parser("suite", help="run the acceptance battery")
    sp.add_argument("--quick", action="store_true", help="smaller random samples")
    sp.add_argument("--golden-dir", help="directory of golden regression reports")
    sp.add_argument("--regen-golden", action="store_true", help="rewrite golden files instead of comparing")
    common(sp)
    return ap


_SKIP = {"command", "out", "verbose", "timing", "input"}


def normalize(args: argparse.Namespace) -> dict:
    p = {k: v for k, v in vars(args).items() if k not in _SKIP}
    if args.command == "smith":
        if args.input:
            p["matrix"] = _load_json(args.input)
        elif args.matrix is not None:
            try:
                p["matrix"] = json.loads(args.matrix)
            except json.JSONDecodeError as e:
                raise UsageError(f"malformed JSON matrix: {e}")
        else:
            raise UsageError("smith needs --matrix or --input")
        m = p["matrix"]
        if not isinstance(m, list) or not all(isinstance(r, list) and all(isinstance(v, int) for v in r) for r in m):
            raise UsageError("matrix must be a list of integer rows")
        if len({len(r) for r in m}) > 1:
            raise UsageError("matrix rows have different lengths")
    if args.command == "validate":
        p["input"] = args.input
    if args.command == "resolve" and p.get("points"):
        p["points"] = sorted(set(p["points"]))
    return {k: v for k, v in sorted(p.items()) if v is not None}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    t0 = time.perf_counter()
    try:
        threads()
        params = normalize(args)
        result, validity = COMMANDS[args.command](params)
        report = make_report(args.command, params, result, validity)
        code = 0
        if args.command in ("suite", "validate") and not result.get("passed", result.get("ok", True)):
            code = 1
    except UsageError as e:
        print(f"relcalc: usage error: {e}", file=sys.stderr)
        return 2
    except WindowError as e:
        report = {"tool": "relcalc", "version": __version__, "command": args.command, **e.to_json()}
        code = 1
    except DomainError as e:
        report = {"tool": "relcalc", "version": __version__, "command": args.command,
                  "error": e.kind, "message": str(e), **e.extra}
        code = 1
    except (CategoryError, ArithmeticError, ValueError) as e:
        report = {"tool": "relcalc", "version": __version__, "command": args.command,
                  "error": type(e).__name__, "message": str(e)}
        code = 1
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - t0, 3)
    text = dumps(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
