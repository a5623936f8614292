"""Cross-validation of the two tower constructions and tower reports."""

from __future__ import annotations

from typing import NamedTuple

from ..relres import approx_complex
from .cotriple import connecting_map, layer_homology, pn_homology, required_window
from .crosseffects import finite_class
from .expr import FunctorExpr, WindowError, tabulate


def _cf(cf) -> dict:
    return {"free_rank": cf[0], "invariant_factors": list(cf[1])}


class TowerComparison(NamedTuple):
    functor: str
    n: int
    window: int
    depth: int
    point: int
    relative: list  # canonical forms from the finite-window class
    cotriple: list  # canonical forms from the bar construction

    @property
    def agreement(self) -> list:
        return [a == b for a, b in zip(self.relative, self.cotriple)]

    @property
    def h0_agrees(self) -> bool:
        return self.agreement[0]

    @property
    def all_agree(self) -> bool:
        return all(self.agreement)

    def to_json(self) -> dict:
        return {
            "functor": self.functor,
            "n": self.n,
            "window": self.window,
            "depth": self.depth,
            "point": self.point,
            "valid_degrees": [0, self.depth - 1],
            "degrees": {
                f"H{k}": {"relative": _cf(a), "cotriple": _cf(b), "agree": a == b}
                for k, (a, b) in enumerate(zip(self.relative, self.cotriple))
            },
            "h0_agreement": "exact" if self.h0_agrees else "mismatch",
        }


def compare_towers(T: FunctorExpr, n: int, N: int, depth: int, x: int) -> TowerComparison:
    """Homology of the class-``n`` approximation on ``Γ_N`` against ``P_n T`` at ``[x]``."""
    if x > N:
        raise WindowError(f"point [{x}] lies outside Γ_{N}", x)
    F = tabulate(T, N)
    ax = approx_complex(F, finite_class(n, N, F.category), depth)
    rel = [ax.homology(k, x).canonical_form for k in range(depth)]
    cot = pn_homology(T, n, x, depth).forms()
    return TowerComparison(T.text(), n, N, depth, x, rel, cot)


class TowerReport(NamedTuple):
    functor: str
    point: int
    depth: int
    levels: dict  # n -> dict

    def to_json(self) -> dict:
        return {
            "functor": self.functor,
            "point": self.point,
            "depth": self.depth,
            "levels": {str(n): v for n, v in sorted(self.levels.items())},
        }


def calculus_tower(T: FunctorExpr, x: int, max_n: int, depth: int, window: int | None = None) -> TowerReport:
    """``P_n T`` and ``D_n T`` at ``[x]`` for ``n = 0 .. max_n`` with connecting-map data."""
    levels = {}
    for n in range(max_n + 1):
        P = pn_homology(T, n, x, depth, window)
        D = layer_homology(T, n, x, depth, window)
        entry = {
            "P": P.to_json(),
            "D": D.to_json(),
        }
        if n >= 1:
            f = connecting_map(T, n, x, depth, window)
            on_h = [f.on_homology(k) for k in range(depth)]
            entry["connecting"] = {
                "commutes": f.commutes(),
                "augmentation_compatible": f.augmentation_compatible(),
                "surjective_on_H0": on_h[0].is_surjective(),
                "window": required_window(n, x, depth),
            }
        levels[n] = entry
    return TowerReport(T.text(), x, depth, levels)
