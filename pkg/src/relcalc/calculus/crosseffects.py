"""Cross-effects, Eilenberg-MacLane degree and the classes of smash-type projectives."""

from __future__ import annotations

import logging
from itertools import combinations
from typing import NamedTuple, Optional, Sequence

from ..exactlin import FgAbGroup, GroupHom, canonical_form, direct_sum
from ..relres import ProjectiveClass, smash_class
from ..sitecat import GammaWindow, NatHom, cross_effect_of, gamma_window
from .expr import FunctorExpr, Tab, WindowError, tabulate

log = logging.getLogger(__name__)


class CrossEffectResult(NamedTuple):
    sizes: tuple
    group: FgAbGroup
    inclusion: GroupHom

    def to_json(self) -> dict:
        return {"tuple": list(self.sizes), "group": self.group.canonical_json()}


def _check(T, total, window):
    if window is not None and total > window:
        raise WindowError(f"tuple needs [{total}] but the window is Γ_{window}", total)
    T.check_window(total)


def cross_effect(T: FunctorExpr, sizes: Sequence[int], window: int | None = None) -> CrossEffectResult:
    """``cr_k T(a_1, ..., a_k)`` as the joint kernel of the collapse maps."""
    sizes = tuple(int(a) for a in sizes)
    if any(a < 0 for a in sizes):
        raise ValueError("tuple entries must be non-negative")
    _check(T, sum(sizes), window)
    K, inc = cross_effect_of(T, sizes)
    return CrossEffectResult(sizes, K, inc)


def splitting_check(T: FunctorExpr, sizes: Sequence[int], window: int | None = None):
    """``T(a_1 ∨ ... ∨ a_k)`` against the sum of cross-effects over all subsets.

    Returns ``(ok, whole, parts)`` with canonical forms.
    """
    sizes = tuple(sizes)
    _check(T, sum(sizes), window)
    parts = [T.value(0)]
    for r in range(1, len(sizes) + 1):
        for sub in combinations(sizes, r):
            parts.append(cross_effect(T, sub).group)
    whole = canonical_form(T.value(sum(sizes)))
    total = canonical_form(direct_sum(parts))
    return whole == total, whole, total


def window_tuples(k: int, N: int) -> list:
    """All ``(a_1, ..., a_k)`` with ``a_i >= 1`` and sum ``<= N``."""
    out = []

    def rec(prefix, room):
        if len(prefix) == k:
            out.append(tuple(prefix))
            return
        for a in range(1, room - (k - len(prefix) - 1) + 1):
            rec(prefix + [a], room - a)

    if k >= 1:
        rec([], N)
    return out


class DegreeVerdict(NamedTuple):
    ok: bool
    n: int
    window: int
    checked: list
    witness: Optional[tuple]

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {
            "degree_at_most": self.n,
            "holds_on_window": self.ok,
            "window": self.window,
            "checked_tuples": [list(t) for t in self.checked],
            "witness": None if self.witness is None else list(self.witness),
        }


def degree_at_most(T: FunctorExpr, n: int, window: int) -> DegreeVerdict:
    """``cr_{n+1} T`` vanishes on every tuple that fits in ``Γ_window``."""
    _check(T, window, None)
    checked = []
    for t in window_tuples(n + 1, window):
        checked.append(t)
        if not cross_effect(T, t).group.is_trivial():
            return DegreeVerdict(False, n, window, checked, t)
    return DegreeVerdict(True, n, window, checked, None)


def finite_class(n: int, N: int, category: GammaWindow | None = None) -> ProjectiveClass:
    """Members ``h̄_{a_1} ⊗ ... ⊗ h̄_{a_k}`` with ``k > n`` and ``Σ a_i <= N``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    C = category if category is not None else gamma_window(N)
    return smash_class(C, n)


class PerpDegreeVerdict(NamedTuple):
    agree: bool
    perp: bool
    degree: bool
    rows: list  # (tuple, nat_hom form, cross-effect form)

    def to_json(self) -> dict:
        return {
            "hom_equals_cross_effect": self.agree,
            "in_perp": self.perp,
            "degree_at_most_n": self.degree,
            "rows": [
                {"tuple": list(t), "nat_hom": _cf_json(h), "cross_effect": _cf_json(c)}
                for t, h, c in self.rows
            ],
        }


def _cf_json(cf) -> dict:
    return {"free_rank": cf[0], "invariant_factors": list(cf[1])}


def perp_equals_degree(T, n: int, N: int) -> PerpDegreeVerdict:
    """Compare ``nat_hom(member, T)`` with ``cr_k T`` for each member of ``finite_class(n, N)``.

    ``T`` is a functor expression or a window functor on ``Γ_N``; the
    natural-transformation side is solved directly on the window.
    """
    if isinstance(T, FunctorExpr):
        F = tabulate(T, N)
        expr = T
    else:
        F = T
        expr = Tab(T)
    cls = finite_class(n, N, F.category)
    rows = []
    for m in cls:
        hom = NatHom(m.functor, F).group.canonical_form
        cr = cross_effect(expr, m.sizes).group.canonical_form
        rows.append((m.sizes, hom, cr))
    agree = all(h == c for _, h, c in rows)
    perp = all(h == (0, ()) for _, h, _ in rows)
    deg = degree_at_most(expr, n, N).ok
    return PerpDegreeVerdict(agree and perp == deg, perp, deg, rows)
