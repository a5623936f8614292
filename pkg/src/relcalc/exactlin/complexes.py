"""Bounded chain complexes of presented groups and their homology."""

from __future__ import annotations

from typing import Sequence

from .groups import FgAbGroup, GroupHom, Lifter, kernel
from .matrix import IntMatrix, hstack


class Complex:
    """``C_low, ..., C_high`` with differentials ``d_i: C_i -> C_{i-1}``.

    ``differentials[k]`` is ``d_{low + k + 1}``; degrees outside the
    stored range hold the zero group.
    """

    def __init__(self, low: int, groups: Sequence[FgAbGroup], differentials: Sequence[GroupHom]):
        if len(differentials) != max(len(groups) - 1, 0):
            raise ValueError("need exactly one differential between consecutive groups")
        for k, d in enumerate(differentials):
            if d.source is not groups[k + 1] and d.source.ngens != groups[k + 1].ngens:
                raise ValueError(f"differential {low + k + 1} has the wrong source")
            if d.target is not groups[k] and d.target.ngens != groups[k].ngens:
                raise ValueError(f"differential {low + k + 1} has the wrong target")
        self.low = low
        self.groups = list(groups)
        self.differentials = list(differentials)

    @property
    def high(self) -> int:
        return self.low + len(self.groups) - 1

    def group(self, i: int) -> FgAbGroup:
        if self.low <= i <= self.high:
            return self.groups[i - self.low]
        return FgAbGroup.trivial()

    def d(self, i: int) -> GroupHom | None:
        """``d_i: C_i -> C_{i-1}``, or ``None`` if either end is outside the support."""
        if self.low < i <= self.high:
            return self.differentials[i - self.low - 1]
        return None

    def is_complex(self) -> bool:
        """``d_{i} ∘ d_{i+1} == 0`` modulo relations, for every stored pair."""
        for i in range(self.low + 1, self.high):
            if not (self.d(i) @ self.d(i + 1)).is_zero():
                return False
        return True

    def homology(self, i: int) -> FgAbGroup:
        return homology(self, i)

    def to_json(self) -> dict:
        return {
            "low": self.low,
            "groups": [G.to_json() for G in self.groups],
            "differentials": [d.matrix.to_json() for d in self.differentials],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Complex":
        groups = [FgAbGroup.from_json(g) for g in obj["groups"]]
        diffs = [
            GroupHom(groups[k + 1], groups[k], IntMatrix.from_json(m))
            for k, m in enumerate(obj["differentials"])
        ]
        return cls(obj["low"], groups, diffs)


def homology(C: Complex, i: int) -> FgAbGroup:
    """``ker d_i / im d_{i+1}``; degrees outside the support give the zero group."""
    if not C.low <= i <= C.high:
        return FgAbGroup.trivial()
    Ci = C.group(i)
    out = C.d(i)
    if out is None:
        K, inc = Ci, GroupHom.identity(Ci)
    else:
        K, inc = kernel(out)
    inc_d = C.d(i + 1)
    if inc_d is None:
        return K
    lifter = Lifter(inc)
    lifted = []
    for c in inc_d.matrix.columns():
        z = lifter.lift(c)
        if z is None:
            raise ValueError(f"d_{i} ∘ d_{i + 1} != 0")
        lifted.append(z)
    extra = IntMatrix(K.ngens, len(lifted), lifted)
    return FgAbGroup(K.ngens, hstack([K.relations, extra], rows=K.ngens))


def cone(f_maps: Sequence[GroupHom], A: Complex, B: Complex) -> Complex:
    """Mapping cone of a chain map ``f: A -> B`` given degreewise from ``A.low``.

    ``Cone_k = A_{k-1} ⊕ B_k`` with ``d(a, b) = (-d a, f a + d b)``.
    Both complexes must share the same low degree.
    """
    from .groups import direct_sum

    if A.low != B.low:
        raise ValueError("cone needs complexes with the same low degree")
    low = A.low
    high = max(A.high + 1, B.high)
    groups = [direct_sum([A.group(k - 1), B.group(k)]) for k in range(low, high + 1)]

    def fmap(k):
        if A.low <= k <= A.high:
            return f_maps[k - A.low].matrix
        return IntMatrix(B.group(k).ngens, A.group(k).ngens)

    def dmat(C, k):
        d = C.d(k)
        if d is None:
            return IntMatrix(C.group(k - 1).ngens, C.group(k).ngens)
        return d.matrix

    diffs = []
    for k in range(low + 1, high + 1):
        a_src, b_src = A.group(k - 1).ngens, B.group(k).ngens
        a_tgt = A.group(k - 2).ngens
        cols = []
        da = dmat(A, k - 1)
        fa = fmap(k - 1)
        db = dmat(B, k)
        for j in range(a_src):
            col = {i: -v for i, v in da.column(j).items()} if k - 1 > A.low else {}
            for i, v in fa.column(j).items():
                col[a_tgt + i] = v
            cols.append(col)
        for j in range(b_src):
            cols.append({a_tgt + i: v for i, v in db.column(j).items()})
        src, tgt = groups[k - low], groups[k - 1 - low]
        diffs.append(GroupHom(src, tgt, IntMatrix(tgt.ngens, src.ngens, cols)))
    return Complex(low, groups, diffs)
