"""Smith normal form, column echelon reduction, kernels and integer solving."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Optional, Sequence

from .matrix import IntMatrix, add_scaled


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(x, y, g)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V == S`` with ``S`` diagonal and ``U, V`` unimodular.

    ``U_inv`` and ``V_inv`` are the exact inverses; ``diagonal`` lists the
    ``min(rows, cols)`` diagonal entries of ``S`` (nonnegative, each dividing
    the next, zeros trailing).
    """

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix
    diagonal: tuple

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def smith(A: IntMatrix) -> SmithForm:
    """Dense Smith normal form with transforms.

    Pivoting picks the smallest nonzero entry of the remaining block, so
    intermediate growth stays mild on the sizes this package feeds it.
    """
    m, n = A.rows, A.cols
    D = A.to_rows()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    # Row op "row_a += q*row_b" on D and U; inverse column op on Ui.
    def row_add(a, b, q):
        if not q:
            return
        Da, Db = D[a], D[b]
        for j in range(n):
            if Db[j]:
                Da[j] += q * Db[j]
        Ua, Ub = U[a], U[b]
        for j in range(m):
            if Ub[j]:
                Ua[j] += q * Ub[j]
        for r in Ui:
            if r[a]:
                r[b] -= q * r[a]

    def row_swap(a, b):
        D[a], D[b] = D[b], D[a]
        U[a], U[b] = U[b], U[a]
        for r in Ui:
            r[a], r[b] = r[b], r[a]

    def row_neg(a):
        D[a] = [-x for x in D[a]]
        U[a] = [-x for x in U[a]]
        for r in Ui:
            r[a] = -r[a]

    # Column op "col_a += q*col_b" on D and V; inverse row op on Vi.
    def col_add(a, b, q):
        if not q:
            return
        for r in D:
            if r[b]:
                r[a] += q * r[b]
        for r in V:
            if r[b]:
                r[a] += q * r[b]
        Va, Vb = Vi[a], Vi[b]
        for j in range(n):
            if Va[j]:
                Vb[j] -= q * Va[j]

    def col_swap(a, b):
        for r in D:
            r[a], r[b] = r[b], r[a]
        for r in V:
            r[a], r[b] = r[b], r[a]
        Vi[a], Vi[b] = Vi[b], Vi[a]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            row_swap(t, pi)
        if pj != t:
            col_swap(t, pj)
        while True:
            p = D[t][t]
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    row_add(i, t, -(D[i][t] // p))
                    if D[i][t]:
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    col_add(j, t, -(D[t][j] // p))
                    if D[t][j]:
                        done = False
            if not done:
                # move the smallest remainder into the pivot slot
                cand = [(abs(D[i][t]), i, None) for i in range(t + 1, m) if D[i][t]]
                cand += [(abs(D[t][j]), None, j) for j in range(t + 1, n) if D[t][j]]
                _, i, j = min(cand, key=lambda c: c[0])
                if i is not None:
                    row_swap(t, i)
                else:
                    col_swap(t, j)
                continue
            # pivot must divide the whole remaining block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, 1)
        if D[t][t] < 0:
            row_neg(t)
        t += 1

    diag = tuple(D[i][i] for i in range(min(m, n)))
    return SmithForm(
        U=IntMatrix.from_rows(U, cols=m),
        S=IntMatrix.from_rows(D, cols=n),
        V=IntMatrix.from_rows(V, cols=n),
        U_inv=IntMatrix.from_rows(Ui, cols=m),
        V_inv=IntMatrix.from_rows(Vi, cols=n),
        diagonal=diag,
    )


class Echelon:
    """Column echelon reduction ``A @ V = [H | 0]`` over the integers.

    Pivot rows are chosen dynamically (fewest live entries first) and
    pivot columns by smallest magnitude, which keeps fill-in low on the
    sparse 0/±1 systems generated by functor computations.  ``V`` is
    unimodular, so the columns of ``V`` over zero columns of ``A @ V``
    form a basis of the integer kernel.
    """

    def __init__(self, A: IntMatrix, track: bool = True):
        self.rows = A.rows
        self.ncols = A.cols
        cols = [dict(c) for c in A.columns()]
        V = [{j: 1} for j in range(A.cols)] if track else None
        row_index: dict = {}
        for j, c in enumerate(cols):
            for i in c:
                row_index.setdefault(i, set()).add(j)
        heap = [(len(s), i) for i, s in row_index.items()]
        heapq.heapify(heap)
        pivots = []

        def addcol(c, p, f):
            cc, cp = cols[c], cols[p]
            for i, v in cp.items():
                nv = cc.get(i, 0) + f * v
                if nv:
                    if i not in cc:
                        ri = row_index.setdefault(i, set())
                        ri.add(c)
                        heapq.heappush(heap, (len(ri), i))
                    cc[i] = nv
                elif i in cc:
                    del cc[i]
                    row_index[i].discard(c)
            if V is not None:
                add_scaled(V[c], V[p], f)

        while heap:
            cnt, r = heapq.heappop(heap)
            s = row_index.get(r)
            if not s:
                continue
            if len(s) != cnt:
                heapq.heappush(heap, (len(s), r))
                continue
            while len(s) > 1:
                p = min(s, key=lambda c: (abs(cols[c][r]), len(cols[c])))
                a = cols[p][r]
                for c in list(s):
                    if c != p:
                        addcol(c, p, -(cols[c][r] // a))
            (p,) = s
            if cols[p][r] < 0:
                cols[p] = {i: -v for i, v in cols[p].items()}
                if V is not None:
                    V[p] = {i: -v for i, v in V[p].items()}
            pivots.append((r, p))
            for i in cols[p]:
                row_index[i].discard(p)
                if row_index[i]:
                    heapq.heappush(heap, (len(row_index[i]), i))
        self.pivots = pivots
        self._cols = cols
        self._V = V
        pivot_cols = {p for _, p in pivots}
        self.zero_cols = [j for j in range(A.cols) if j not in pivot_cols]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def pivot_matrix(self) -> IntMatrix:
        """The nonzero part ``H`` of ``A @ V`` (rows x rank)."""
        return IntMatrix(self.rows, self.rank, (self._cols[p] for _, p in self.pivots))

    def kernel_vectors(self) -> list[dict]:
        if self._V is None:
            raise ValueError("echelon built without transform tracking")
        return [dict(self._V[j]) for j in self.zero_cols]

    def solve(self, b: dict) -> Optional[dict]:
        """Some integer ``x`` with ``A x = b``, or ``None`` if there is none."""
        if self._V is None:
            raise ValueError("echelon built without transform tracking")
        pos = self._pivot_pos
        rest = dict(b)
        x: dict = {}
        heap = [pos[r] for r in rest if r in pos]
        heapq.heapify(heap)
        done = -1
        while heap:
            k = heapq.heappop(heap)
            if k <= done:
                continue
            done = k
            r, p = self.pivots[k]
            val = rest.get(r, 0)
            if not val:
                continue
            col = self._cols[p]
            q, rem = divmod(val, col[r])
            if rem:
                return None
            for i, v in col.items():
                nv = rest.get(i, 0) - q * v
                if nv:
                    if i not in rest and i in pos:
                        heapq.heappush(heap, pos[i])
                    rest[i] = nv
                else:
                    rest.pop(i, None)
            add_scaled(x, self._V[p], q)
        if rest:
            return None
        return x

    @cached_property
    def _pivot_pos(self) -> dict:
        return {r: k for k, (r, _) in enumerate(self.pivots)}


class KernelLattice:
    """Integer kernel of a matrix with a basis and a coordinate map."""

    def __init__(self, dim: int, basis: list):
        self.dim = dim
        self.basis = basis
        self._solver = None

    def __len__(self):
        return len(self.basis)

    def matrix(self) -> IntMatrix:
        return IntMatrix(self.dim, len(self.basis), self.basis)

    def coords(self, v: dict) -> dict:
        """Coordinates of ``v`` in ``basis``; raises if ``v`` is not in the span."""
        if self._solver is None:
            self._solver = Echelon(self.matrix())
        x = self._solver.solve(v)
        if x is None:
            raise ValueError("vector is not in the lattice")
        return x


def kernel_lattice(A: IntMatrix) -> KernelLattice:
    """Saturated integer kernel of ``A`` (a basis of ``{x : A x = 0}``)."""
    return KernelLattice(A.cols, Echelon(A).kernel_vectors())


def solve_vector(A: IntMatrix, b: dict) -> Optional[dict]:
    return Echelon(A).solve(b)


def _unit_pivot_reduce(A: IntMatrix):
    """Strip ±1 pivots (each contributes an invariant factor 1).

    Returns the number removed and the residual rows as dicts.
    """
    rows = {i: r for i, r in enumerate(A.row_dicts()) if r}
    col_index: dict = {}
    for rid, row in rows.items():
        for v in row:
            col_index.setdefault(v, set()).add(rid)
    removed = 0
    progress = True
    while progress:
        progress = False
        for rid in sorted(rows, key=lambda r: len(rows[r])):
            row = rows.get(rid)
            if row is None:
                continue
            if not row:
                del rows[rid]
                continue
            best = None
            for v, c in row.items():
                if c == 1 or c == -1:
                    k = len(col_index[v])
                    if best is None or k < best[0]:
                        best = (k, v)
            if best is None:
                continue
            v = best[1]
            cv = row[v]
            del rows[rid]
            for w in row:
                col_index[w].discard(rid)
            for other in list(col_index[v]):
                orow = rows[other]
                f = -orow[v] * cv
                for w, c in row.items():
                    nv = orow.get(w, 0) + f * c
                    if nv:
                        if w not in orow:
                            col_index[w].add(other)
                        orow[w] = nv
                    elif w in orow:
                        del orow[w]
                        col_index[w].discard(other)
            removed += 1
            progress = True
    return removed, [r for r in rows.values() if r]


def invariant_factors(A: IntMatrix) -> tuple[int, list[int]]:
    """``(rank, nontrivial invariant factors)`` of ``A``; factors are > 1, ascending by divisibility."""
    ones, residual = _unit_pivot_reduce(A)
    if not residual:
        return ones, []
    used = sorted({v for r in residual for v in r})
    pos = {v: k for k, v in enumerate(used)}
    cols = [{} for _ in used]
    for i, r in enumerate(residual):
        for v, c in r.items():
            cols[pos[v]][i] = c
    R = IntMatrix(len(residual), len(used), cols)
    if R.rows * R.cols > 400:
        # shrink to a square full-rank block before the dense pass
        H = Echelon(R, track=False).pivot_matrix()
        R = Echelon(H.T, track=False).pivot_matrix()
        more, residual = _unit_pivot_reduce(R)
        ones += more
        if not residual:
            return ones, []
        used = sorted({v for r in residual for v in r})
        pos = {v: k for k, v in enumerate(used)}
        cols = [{} for _ in used]
        for i, r in enumerate(residual):
            for v, c in r.items():
                cols[pos[v]][i] = c
        R = IntMatrix(len(residual), len(used), cols)
    diag = smith(R).diagonal
    nz = [d for d in diag if d]
    return ones + len(nz), [d for d in nz if d > 1]
