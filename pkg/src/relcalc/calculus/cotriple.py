"""Cotriple bar construction for the degree-n approximation ``P_n T`` and its layers.

With ``c = n + 1`` copies, ``⊥^j T(X)`` lives inside ``T([x c^j])``.  A
point of ``[x c^j]`` is a tuple ``(p, c_1, ..., c_j)`` with ``p < x`` the
point of ``X`` and ``c_l < c`` the copy at level ``l``; its number is
``1 + p + x (c_1 + c (c_2 + ...))``.  ``⊥^j T(X)`` is the joint kernel of
collapsing any single copy at any single level, and face ``l`` folds
level ``l`` away.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

from ..exactlin import (
    Complex,
    FgAbGroup,
    GroupHom,
    IntMatrix,
    Lifter,
    cone,
    direct_sum,
    homology,
    kernel,
    vstack,
)
from ..sitecat import PMap
from .expr import FunctorExpr, WindowError


def _digits(q, x, c, j):
    """Point number (1-based) to ``(p, [c_1, ..., c_j])``."""
    q -= 1
    p, q = q % x, q // x
    cs = []
    for _ in range(j):
        cs.append(q % c)
        q //= c
    return p, cs


def _number(p, cs, x, c):
    q = 0
    for v in reversed(cs):
        q = q * c + v
    return 1 + p + x * q


def fold_level(x: int, c: int, j: int, level: int) -> PMap:
    """``[x c^j] -> [x c^(j-1)]`` forgetting the copy index at ``level`` (1-based)."""
    imgs = []
    for q in range(1, x * c ** j + 1):
        p, cs = _digits(q, x, c, j)
        del cs[level - 1]
        imgs.append(_number(p, cs, x, c))
    return PMap(x * c ** j, x * c ** (j - 1), tuple(imgs))


def collapse_level(x: int, c: int, j: int, level: int, r: int) -> PMap:
    """Send copy ``r`` at ``level`` to the basepoint, renumbering the rest in order."""
    imgs, nxt = [], 1
    for q in range(1, x * c ** j + 1):
        _, cs = _digits(q, x, c, j)
        if cs[level - 1] == r:
            imgs.append(0)
        else:
            imgs.append(nxt)
            nxt += 1
    return PMap(x * c ** j, nxt - 1, tuple(imgs))


def merge_last_copy(x: int, c: int, j: int) -> PMap:
    """``[x c^j] -> [x (c-1)^j]``: at every level copy ``c-1`` joins copy ``c-2``."""
    imgs = []
    for q in range(1, x * c ** j + 1):
        p, cs = _digits(q, x, c, j)
        imgs.append(_number(p, [min(v, c - 2) for v in cs], x, c - 1))
    return PMap(x * c ** j, x * (c - 1) ** j, tuple(imgs))


def required_window(n: int, x: int, depth: int) -> int:
    return x * (n + 1) ** depth


class BarComplex(NamedTuple):
    """Terms ``C_0 .. C_top`` with ``C_j = ⊥^j T(X)`` and inclusions into ``T([x c^j])``."""

    T: FunctorExpr
    n: int
    x: int
    complex: Complex
    inclusions: list

    @property
    def top(self) -> int:
        return self.complex.high


def _restrict(h: IntMatrix, inc_src: GroupHom, lifter: Lifter, tgt: FgAbGroup, src: FgAbGroup) -> GroupHom:
    img = h @ inc_src.matrix
    cols = []
    for col in img.columns():
        z = lifter.lift(col)
        if z is None:
            raise ArithmeticError("map does not preserve the cotriple subgroups")
        cols.append(z)
    return GroupHom(src, tgt, IntMatrix(tgt.ngens, len(cols), cols))


def _check_window(T, n, x, top, window):
    need = required_window(n, x, top)
    if window is not None and need > window:
        raise WindowError(
            f"bar construction for n={n}, X=[{x}] to degree {top} needs [{need}], window is Γ_{window}",
            need,
        )
    T.check_window(need)


def bar_complex(T: FunctorExpr, n: int, x: int, depth: int, window: int | None = None) -> BarComplex:
    """``T(X) <- ⊥T(X) <- ... <- ⊥^depth T(X)`` with ``⊥ = cr_{n+1} ∘ diagonal``."""
    if n < 0 or x < 0 or depth < 0:
        raise ValueError("n, x and depth must be non-negative")
    _check_window(T, n, x, depth, window)
    c = n + 1
    groups, incs, lifters = [], [], []
    for j in range(depth + 1):
        m = x * c ** j
        src = T.value(m)
        if j == 0:
            K, inc = src, GroupHom.identity(src)
        else:
            maps = [T.act(collapse_level(x, c, j, l, r)) for l in range(1, j + 1) for r in range(c)]
            stacked = GroupHom(src, direct_sum([h.target for h in maps]),
                               vstack([h.matrix for h in maps], cols=src.ngens))
            K, inc = kernel(stacked)
        groups.append(K)
        incs.append(inc)
        lifters.append(Lifter(inc))
    diffs = []
    for j in range(1, depth + 1):
        h = None
        for l in range(1, j + 1):
            f = T.act(fold_level(x, c, j, l)).matrix
            f = f if l % 2 else -f
            h = f if h is None else h + f
        diffs.append(_restrict(h, incs[j], lifters[j - 1], groups[j - 1], groups[j]))
    C = Complex(0, groups, diffs)
    return BarComplex(T, n, x, C, incs)


class HomologyTable(NamedTuple):
    groups: list  # H_0 .. H_{depth-1}
    depth: int
    window: int

    def forms(self) -> list:
        return [G.canonical_form for G in self.groups]

    def to_json(self) -> dict:
        return {
            "homology": {f"H{k}": G.canonical_json() for k, G in enumerate(self.groups)},
            "valid_degrees": [0, self.depth - 1],
            "window": self.window,
        }


def pn_homology(T: FunctorExpr, n: int, x: int, depth: int, window: int | None = None) -> HomologyTable:
    """``H_0 .. H_{depth-1}`` of ``P_n T`` at ``[x]``; ``H_0`` is the degree-n quotient of ``T(X)``."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    B = bar_complex(T, n, x, depth, window)
    return HomologyTable([homology(B.complex, k) for k in range(depth)], depth, required_window(n, x, depth))


class ChainMap(NamedTuple):
    source: BarComplex
    target: BarComplex
    maps: list  # GroupHom per degree

    def commutes(self) -> bool:
        S, Tc = self.source.complex, self.target.complex
        for j in range(1, len(self.maps)):
            lhs = Tc.d(j) @ self.maps[j]
            rhs = self.maps[j - 1] @ S.d(j)
            if not (lhs - rhs).is_zero():
                return False
        return True

    def augmentation_compatible(self) -> bool:
        """Both augmentations land in ``T(X)``; degree 0 must be the identity there."""
        return self.maps[0].equals(GroupHom.identity(self.source.complex.group(0)))

    def on_homology(self, k: int) -> GroupHom:
        S, Tc = self.source.complex, self.target.complex
        Hs, Ht = homology(S, k), homology(Tc, k)
        f = self.maps[k]
        if S.d(k) is None:
            return GroupHom(Hs, Ht, f.matrix)
        Ks, incs = kernel(S.d(k))
        Kt, inct = kernel(Tc.d(k)) if Tc.d(k) is not None else (Tc.group(k), GroupHom.identity(Tc.group(k)))
        lifter = Lifter(inct)
        cols = [lifter.lift(col) for col in (f.matrix @ incs.matrix).columns()]
        return GroupHom(Hs, Ht, IntMatrix(Kt.ngens, len(cols), cols))


def _connecting(P: BarComplex, Q: BarComplex) -> ChainMap:
    T, x, c = P.T, P.x, P.n + 1
    maps = []
    for j in range(P.top + 1):
        if j == 0:
            maps.append(GroupHom.identity(P.complex.group(0)))
            continue
        h = T.act(merge_last_copy(x, c, j)).matrix
        maps.append(_restrict(h, P.inclusions[j], Lifter(Q.inclusions[j]), Q.complex.group(j), P.complex.group(j)))
    return ChainMap(P, Q, maps)


def connecting_map(T: FunctorExpr, n: int, x: int, depth: int, window: int | None = None) -> ChainMap:
    """``P_n T -> P_{n-1} T`` at ``[x]`` (terms ``0 .. depth``), merging the last copy at every level."""
    if n < 1:
        raise ValueError("the connecting map needs n >= 1")
    P = bar_complex(T, n, x, depth, window)
    Q = bar_complex(T, n - 1, x, depth, window)
    return _connecting(P, Q)


def layer_homology(T: FunctorExpr, n: int, x: int, depth: int, window: int | None = None) -> HomologyTable:
    """``D_n T`` at ``[x]``: homology of the fibre of ``P_n T -> P_{n-1} T`` in degrees ``< depth``.

    ``H_k(D_n) = H_{k+1}(Cone)``, so both bar complexes are built one
    degree beyond ``depth``.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if n == 0:
        return pn_homology(T, 0, x, depth, window)
    f = connecting_map(T, n, x, depth + 1, window)
    Cn = cone(f.maps, f.source.complex, f.target.complex)
    groups = [homology(Cn, k + 1) for k in range(depth)]
    return HomologyTable(groups, depth, required_window(n, x, depth + 1))
