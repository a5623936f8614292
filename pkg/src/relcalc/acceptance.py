"""The acceptance battery with its brute-force oracles.

Each ``criterion_k`` returns ``(ok, detail)``; ``detail`` is a JSON-able
dict.  All comparisons are exact.
"""

from __future__ import annotations

import itertools
import json
import os
import random
import subprocess
import sys
import tempfile
import time
from math import gcd, prod

from .calculus import (
    FIXTURES,
    cross_effect,
    compare_towers,
    finite_class,
    layer_homology,
    parse_expr,
    pn_homology,
    tabulate,
)
from .exactlin import FgAbGroup, IntMatrix, hom_group, smith, tensor_group
from .relres import ProjectiveClass, engine_invariants, tower
from .sitecat import (
    NatHom,
    combine,
    constant_functor,
    copairing_transform,
    gamma_window,
    nat_hom,
    representable,
    splitting_map,
)

# ---------------------------------------------------------------------------
# oracles


def det(rows) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def determinantal_divisors(rows) -> list:
    """``d_k`` = gcd of all ``k x k`` minors, for ``k = 1 .. min(m, n)``."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for ri in itertools.combinations(range(m), k):
            for ci in itertools.combinations(range(n), k):
                g = gcd(g, det([[rows[i][j] for j in ci] for i in ri]))
        out.append(g)
    return out


def abelian_groups_up_to(bound: int) -> list:
    """Invariant-factor lists ``d_1 | d_2 | ...`` of all finite abelian groups of order ``<= bound``."""

    def rec(rem, last, prefix, out):
        if rem == 1:
            out.append(prefix)
            return
        for d in range(2, rem + 1):
            if rem % d == 0 and d % last == 0:
                rec(rem // d, d, prefix + [d], out)

    groups = []
    for n in range(1, bound + 1):
        rec(n, 1, [], groups)
    return groups


def brute_hom_count(G: list, H: list) -> int:
    """Enumerate candidate generator images in ``H`` and keep the homomorphisms."""
    elems = list(itertools.product(*[range(e) for e in H]))
    total = 1
    for d in G:
        total *= sum(1 for h in elems if all((d * x) % e == 0 for x, e in zip(h, H)))
    return total


def brute_tensor_order(G: list, H: list) -> int:
    """``|G ⊗ H|`` as the number of bilinear maps ``G x H -> Z/m`` for a large enough ``m``."""
    if not G or not H:
        return 1
    m = 1
    for d in G + H:
        m = m * d // gcd(m, d)
    total = 1
    for d in G:
        for e in H:
            total *= sum(1 for c in range(m) if (d * c) % m == 0 and (e * c) % m == 0)
    return total


# ---------------------------------------------------------------------------
# criteria


def criterion_1(samples: int = 500, seed: int = 20240611):
    rng = random.Random(seed)
    t0 = time.perf_counter()
    bad = []
    for k in range(samples):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        rows = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
        A = IntMatrix.from_rows(rows)
        f = smith(A)
        diag = list(f.diagonal)
        ok = (f.U @ A @ f.V) == f.S
        ok &= (f.U @ f.U_inv) == IntMatrix.identity(m) and (f.V @ f.V_inv) == IntMatrix.identity(n)
        ok &= abs(det(f.U.to_rows())) == 1 and abs(det(f.V.to_rows())) == 1
        S = f.S.to_rows()
        ok &= all(S[i][j] == 0 for i in range(m) for j in range(n) if i != j)
        nz = [d for d in diag if d]
        ok &= all(d > 0 for d in nz) and diag[: len(nz)] == nz
        ok &= all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
        dd = determinantal_divisors(rows)
        ok &= all(prod(diag[:k]) == dd[k - 1] for k in range(1, len(dd) + 1))
        if not ok:
            bad.append(rows)
    dt = time.perf_counter() - t0
    return not bad and dt < 10, {"samples": samples, "failures": len(bad), "seconds": round(dt, 2)}


def criterion_2(bound: int = 36):
    t0 = time.perf_counter()
    groups = abelian_groups_up_to(bound)
    bad = []
    for G in groups:
        for H in groups:
            g, h = FgAbGroup.from_invariants(0, G), FgAbGroup.from_invariants(0, H)
            hom = hom_group(g, h)[0].order()
            ten = tensor_group(g, h).order()
            if hom != brute_hom_count(G, H) or ten != brute_tensor_order(G, H):
                bad.append((G, H))
    dt = time.perf_counter() - t0
    return not bad and dt < 60, {
        "groups": len(groups),
        "pairs": len(groups) ** 2,
        "failures": [list(map(list, p)) for p in bad[:5]],
        "seconds": round(dt, 2),
    }


def _fixture_functors(C):
    return [(t, tabulate(parse_expr(t), C.N, C)) for t in FIXTURES]


def criterion_3():
    t0 = time.perf_counter()
    C = gamma_window(3)
    Z = constant_functor(C, FgAbGroup.free(1))
    fails = []
    for a in (1, 2, 3):
        s = splitting_map(C, a)
        same = all(
            s.source.value(b).canonical_form == s.target.value(b).canonical_form for b in C.objects
        )
        if not (same and s.is_iso() and s.is_natural(exhaustive=True)):
            fails.append(f"splitting at [{a}]")
    for i in range(1, 4):
        for j in range(1, 4 - i):
            t = copairing_transform(C, i, j)
            same = all(
                t.source.value(b).canonical_form == t.target.value(b).canonical_form for b in C.objects
            )
            if not (same and t.is_iso() and t.is_natural(exhaustive=True)):
                fails.append(f"h_{i}⊗h_{j}")
    functors = _fixture_functors(C) + [("Z", Z)]
    for name, F in functors:
        for a in C.objects:
            if nat_hom(representable(C, a), F).group.canonical_form != F.value(a).canonical_form:
                fails.append(f"yoneda {name} at [{a}]")
    dt = time.perf_counter() - t0
    return not fails and dt < 120, {"failures": fails, "seconds": round(dt, 2)}


def window_tuples(N):
    out = []
    for k in range(1, N + 1):
        for t in itertools.product(range(1, N + 1), repeat=k):
            if sum(t) <= N:
                out.append(t)
    return out


def criterion_4():
    t0 = time.perf_counter()
    C = gamma_window(3)
    fails, rows = [], 0
    for name in FIXTURES:
        expr = parse_expr(name)
        F = tabulate(expr, 3, C)
        for t in window_tuples(3):
            member = representable(C, t[0], reduced=True)
            for a in t[1:]:
                member = combine(member, representable(C, a, reduced=True), "tensor")
            lhs = NatHom(member, F).group.canonical_form
            rhs = cross_effect(parse_expr(name), t).group.canonical_form
            rows += 1
            if lhs != rhs:
                fails.append(f"{name} at {t}: {lhs} vs {rhs}")
    dt = time.perf_counter() - t0
    return not fails and dt < 300, {"checked": rows, "failures": fails, "seconds": round(dt, 2)}


def engine_fixtures(C):
    P1, P2 = finite_class(1, 3, C), finite_class(2, 3, C)
    H1 = ProjectiveClass(C, [(1,)], "hbar_1")
    tab = lambda t: tabulate(parse_expr(t), 3, C)  # noqa: E731
    return [
        (tab("const(Z)"), P1),
        (tab("const(Z/2)"), P1),
        (tab("lin"), P1),
        (tab("pow(lin,2)"), P1),
        (tab("pow(lin,2)"), P2),
        (tab("pow(lin,3)"), P1),
        (tab("pow(lin,3)"), P2),
        (tab("sym2(lin)"), P1),
        (tab("sym2(lin)"), P2),
        (tab("ext2(lin)"), P1),
        (tab("coef(lin,Z/2)"), P1),
        (representable(C, 1), H1),
        (representable(C, 1, reduced=True), H1),
        (representable(C, 2), P1),
    ]


def criterion_5(depth: int = 3):
    t0 = time.perf_counter()
    C = gamma_window(3)
    Z = constant_functor(C, FgAbGroup.free(1))
    Z2 = constant_functor(C, FgAbGroup.cyclic(2))
    rows, fails = {}, []
    for A, cls in engine_fixtures(C):
        r = engine_invariants(A, cls, depth, [Z, Z2])
        key = f"{A.name} / {cls.name}"
        rows[key] = r
        if not all(r.values()):
            fails.append(key)
    P1, P2 = finite_class(1, 3, C), finite_class(2, 3, C)
    for t in ("pow(lin,2)", "pow(lin,3)", "sym2(lin)", "ext2(lin)"):
        tw = tower(tabulate(parse_expr(t), 3, C), [P1, P2], depth)
        ok = tw.quotient_map(0).is_epi() and all(tw.lifts[0].commutes(b) for b in C.objects)
        rows[f"tower {t}"] = {"quotient_maps_surjective": ok}
        if not ok:
            fails.append(f"tower {t}")
    dt = time.perf_counter() - t0
    return not fails and dt < 300, {"failures": fails, "checks": rows, "seconds": round(dt, 2)}


def criterion_6():
    fails = []
    table = {}
    for k in (1, 2):
        T = parse_expr(f"pow(lin,{k})")
        for x in (0, 1, 2):
            H = pn_homology(T, k, x, 3).forms()
            table[f"k={k} x={x}"] = [{"free_rank": h[0], "invariant_factors": list(h[1])} for h in H]
            if H != [(x ** k, ()), (0, ()), (0, ())]:
                fails.append((k, x))
    return not fails, {"failures": [list(f) for f in fails], "homology": table}


def criterion_7():
    T = parse_expr("pow(lin,2)")
    fails = []
    for x in (1, 2):
        H = pn_homology(T, 1, x, 3).forms()
        if any(h != (0, ()) for h in H):
            fails.append((x, H))
    return not fails, {"failures": [str(f) for f in fails]}


def criterion_8():
    t0 = time.perf_counter()
    rows = {}
    ok = True
    for t in ("pow(lin,2)", "sym2(lin)"):
        for n in (1, 2):
            r = compare_towers(parse_expr(t), n, 3, 2, 1)
            rows[f"{t} n={n}"] = r.to_json()
            ok &= r.agreement[0] and r.agreement[1]
    dt = time.perf_counter() - t0
    return ok and dt < 600, {"comparisons": rows, "seconds": round(dt, 2)}


DETERMINISM_COMMANDS = [
    ["tower", "--functor", "sym2(lin)", "--window", "3", "--depth", "2", "--max-n", "2", "--point", "1"],
    ["compare-towers", "--functor", "pow(lin,2)", "--n", "1", "--window", "3", "--depth", "2", "--point", "1"],
    ["compare-towers", "--functor", "ext2(lin)", "--n", "1", "--window", "3", "--depth", "3", "--point", "2"],
]


def criterion_9():
    """Two fresh interpreter runs per command (different hash seeds) must give identical bytes."""
    results = {}
    ok = True
    with tempfile.TemporaryDirectory() as tmp:
        for cmd in DETERMINISM_COMMANDS:
            outs = []
            for run, seed in enumerate(("1", "2")):
                path = os.path.join(tmp, f"{cmd[0]}-{run}.json")
                env = dict(os.environ, PYTHONHASHSEED=seed)
                proc = subprocess.run(
                    [sys.executable, "-m", "relcalc.cli", *cmd, "--out", path],
                    env=env,
                    capture_output=True,
                )
                if proc.returncode != 0:
                    ok = False
                with open(path, "rb") as fh:
                    outs.append(fh.read())
            same = outs[0] == outs[1]
            results[" ".join(cmd)] = same
            ok &= same
    return ok, {"identical": results}


CRITERIA = [
    ("1 SNF suite", criterion_1),
    ("2 group-operation oracle", criterion_2),
    ("3 structural identities on Γ_3", criterion_3),
    ("4 cross-effect Yoneda", criterion_4),
    ("5 engine invariants", criterion_5),
    ("6 degree fixed points", criterion_6),
    ("7 homogeneous vanishing", criterion_7),
    ("8 tower equivalence", criterion_8),
    ("9 determinism", criterion_9),
]


# ---------------------------------------------------------------------------
# golden regression fixtures (layer homology of Sym2 / Ext2, self-generated)

GOLDEN_CASES = [
    ("sym2(lin)", 2, 1, 2),
    ("sym2(lin)", 2, 2, 2),
    ("ext2(lin)", 2, 1, 2),
    ("ext2(lin)", 2, 2, 2),
    ("sym2(lin)", 1, 1, 3),
]


def golden_payload() -> dict:
    out = {}
    for t, n, x, depth in GOLDEN_CASES:
        out[f"{t} n={n} x={x} depth={depth}"] = layer_homology(parse_expr(t), n, x, depth).to_json()
    return out


def check_golden(golden_dir: str, regen: bool = False):
    path = os.path.join(golden_dir, "layers.json")
    payload = golden_payload()
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if regen:
        os.makedirs(golden_dir, exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)
        return True, {"regenerated": path}
    if not os.path.exists(path):
        return False, {"missing": path}
    with open(path) as fh:
        return fh.read() == text, {"file": path}


def run_all(quick: bool = False, golden_dir: str | None = None, regen: bool = False) -> list:
    out = []
    for name, fn in CRITERIA:
        if quick and name.startswith("1"):
            ok, det_ = fn(samples=100)
        elif quick and name.startswith("2"):
            ok, det_ = fn(bound=16)
        else:
            ok, det_ = fn()
        out.append((name, bool(ok), det_))
    if golden_dir:
        ok, det_ = check_golden(golden_dir, regen)
        out.append(("golden layers", ok, det_))
    return out
