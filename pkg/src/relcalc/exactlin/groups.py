"""Finitely generated abelian groups given by presentations, and their maps.

A group on ``n`` generators is ``Z^n`` modulo the column span of its
relation matrix.  Two groups are "equal" in this package when their
canonical forms (free rank plus invariant factors) agree.
"""

from __future__ import annotations

from functools import cached_property
from math import gcd
from typing import Optional, Sequence

from .matrix import IntMatrix, block_diag, hstack, kron
from .smith import Echelon, KernelLattice, invariant_factors, kernel_lattice, smith


class FgAbGroup:
    def __init__(self, ngens: int, relations: IntMatrix | None = None):
        if relations is None:
            relations = IntMatrix(ngens, 0)
        if relations.rows != ngens:
            raise ValueError(f"relations have {relations.rows} rows for {ngens} generators")
        self.ngens = ngens
        self.relations = relations

    # ---- constructors -------------------------------------------------
    @classmethod
    def free(cls, n: int) -> "FgAbGroup":
        return cls(n)

    @classmethod
    def trivial(cls) -> "FgAbGroup":
        return cls(0)

    @classmethod
    def cyclic(cls, order: int) -> "FgAbGroup":
        """``Z/order``; order 0 gives ``Z``."""
        return cls(1, IntMatrix(1, 1, [{0: order}]))

    @classmethod
    def from_invariants(cls, rank: int, factors: Sequence[int]) -> "FgAbGroup":
        n = rank + len(factors)
        return cls(n, IntMatrix(n, len(factors), ({i: d} for i, d in enumerate(factors))))

    @classmethod
    def parse(cls, text: str) -> "FgAbGroup":
        """Parse ``Z``, ``0``, ``Z/6``, ``Z^2``, ``Z+Z/2``, ``Z^2+Z/4``."""
        text = text.replace(" ", "")
        if text in ("0", ""):
            return cls.trivial()
        rank, factors = 0, []
        for part in text.split("+"):
            if part == "Z":
                rank += 1
            elif part.startswith("Z^"):
                rank += int(part[2:])
            elif part.startswith("Z/"):
                d = int(part[2:])
                if d <= 0:
                    raise ValueError(f"bad cyclic order in {text!r}")
                factors.append(d)
            else:
                raise ValueError(f"cannot parse group {text!r}")
        return cls.from_invariants(rank, factors)

    # ---- invariants ---------------------------------------------------
    @cached_property
    def canonical_form(self) -> tuple[int, tuple]:
        """``(free_rank, invariant_factors)``; factors are > 1 and form a divisibility chain."""
        rank, factors = invariant_factors(self.relations)
        return self.ngens - rank, tuple(factors)

    def is_trivial(self) -> bool:
        return self.canonical_form == (0, ())

    def is_isomorphic(self, other: "FgAbGroup") -> bool:
        return self.canonical_form == other.canonical_form

    def order(self) -> Optional[int]:
        """Cardinality, or ``None`` if infinite."""
        rank, factors = self.canonical_form
        if rank:
            return None
        out = 1
        for d in factors:
            out *= d
        return out

    def describe(self) -> str:
        rank, factors = self.canonical_form
        parts = []
        if rank == 1:
            parts.append("Z")
        elif rank > 1:
            parts.append(f"Z^{rank}")
        parts += [f"Z/{d}" for d in factors]
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"FgAbGroup({self.describe()}; {self.ngens} gens)"

    # ---- elements -----------------------------------------------------
    @cached_property
    def _relation_solver(self) -> Echelon:
        return Echelon(self.relations)

    def is_zero_element(self, v: dict) -> bool:
        if not v:
            return True
        if not self.relations.cols:
            return False
        return self._relation_solver.solve(v) is not None

    @cached_property
    def pruned(self):
        """``(G', pi, sigma)``: an isomorphic presentation with unit relations eliminated.

        ``pi`` (``n' x n``) sends old coordinates to new ones and ``sigma``
        (``n x n'``) sends new generators back; both induce inverse
        isomorphisms.
        """
        return prune_presentation(self)

    @cached_property
    def smith_basis(self):
        """Cyclic decomposition ``[(order, vector)]`` of the nontrivial summands (order 0 = free).

        Also returns the matrix sending generator coordinates to summand
        coordinates (rows aligned with the list).
        """
        n = self.ngens
        if not self.relations.cols:
            return [(0, {i: 1}) for i in range(n)], IntMatrix.identity(n)
        P, pi, sigma = self.pruned
        m = P.ngens
        f = smith(P.relations)
        diag = list(f.diagonal) + [0] * (m - len(f.diagonal))
        keep = [i for i in range(m) if diag[i] != 1]
        summands = [(diag[i], sigma.apply(f.U_inv.column(i))) for i in keep]
        coord = f.U.submatrix(keep, range(m)) @ pi
        return summands, coord

    @cached_property
    def generating_set(self) -> list:
        """Small generating set read off a sparse echelon form of the relations.

        Unit pivot rows are redundant; the rest (non-pivot rows and rows with
        a pivot entry other than ±1) generate.  Cheaper than ``smith_basis``
        on large presentations, though not always minimal.
        """
        if not self.relations.cols:
            return [{i: 1} for i in range(self.ngens)]
        E = Echelon(self.relations, track=False)
        piv = {r: E._cols[p][r] for r, p in E.pivots}
        return [{i: 1} for i in range(self.ngens) if abs(piv.get(i, 0)) != 1]

    @cached_property
    def _smith_rows(self):
        """Rows of ``U pi`` and the padded diagonal, where ``U @ R' @ V = S`` for the pruned ``R'``."""
        P, pi, _ = self.pruned
        f = smith(P.relations)
        diag = list(f.diagonal) + [0] * (P.ngens - len(f.diagonal))
        return (f.U @ pi).row_dicts(), diag

    # ---- JSON ---------------------------------------------------------
    def to_json(self) -> dict:
        return {"generators": self.ngens, "relations": self.relations.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "FgAbGroup":
        return cls(obj["generators"], IntMatrix.from_json(obj["relations"]))

    def canonical_json(self) -> dict:
        rank, factors = self.canonical_form
        return {"free_rank": rank, "invariant_factors": list(factors)}


def prune_presentation(G: FgAbGroup):
    """Tietze elimination of generators that occur with coefficient ±1 in some relation."""
    n = G.ngens
    cols = {j: dict(c) for j, c in enumerate(G.relations.columns()) if c}
    where: dict = {}
    for j, c in cols.items():
        for i in c:
            where.setdefault(i, set()).add(j)
    elim = []
    progress = True
    while progress:
        progress = False
        for j in sorted(cols, key=lambda j: len(cols[j])):
            c = cols.get(j)
            if c is None:
                continue
            best = None
            for i, v in c.items():
                if v == 1 or v == -1:
                    k = len(where[i])
                    if best is None or k < best[0]:
                        best = (k, i)
            if best is None:
                continue
            i = best[1]
            sgn = c[i]
            # s e_i + sum c_k e_k = 0 gives e_i = -s sum c_k e_k
            expr = {k: -sgn * v for k, v in c.items() if k != i}
            del cols[j]
            for k in c:
                where[k].discard(j)
            for o in list(where[i]):
                oc = cols[o]
                f = oc.pop(i)
                for k, v in expr.items():
                    nv = oc.get(k, 0) + f * v
                    if nv:
                        if k not in oc:
                            where[k].add(o)
                        oc[k] = nv
                    elif k in oc:
                        del oc[k]
                        where[k].discard(o)
                if not oc:
                    del cols[o]
            where[i].clear()
            elim.append((i, expr))
            progress = True
    gone = {i for i, _ in elim}
    kept = [i for i in range(n) if i not in gone]
    pos = {g: k for k, g in enumerate(kept)}
    image: dict = {g: {pos[g]: 1} for g in kept}
    for i, expr in reversed(elim):
        out: dict = {}
        for k, v in expr.items():
            for t, w in image[k].items():
                nv = out.get(t, 0) + v * w
                if nv:
                    out[t] = nv
                else:
                    out.pop(t, None)
        image[i] = out
    m = len(kept)
    pi = IntMatrix(m, n, (image[g] for g in range(n)))
    sigma = IntMatrix(n, m, ({g: 1} for g in kept))
    rels = IntMatrix(m, len(cols), ({pos[k]: v for k, v in c.items()} for _, c in sorted(cols.items())))
    return FgAbGroup(m, rels), pi, sigma


def canonical_form(G: FgAbGroup) -> tuple[int, tuple]:
    return G.canonical_form


class GroupHom:
    """Map of presented groups; column ``j`` of ``matrix`` is the image of generator ``j``."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix):
        if matrix.shape != (target.ngens, source.ngens):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match {target.ngens}x{source.ngens}"
            )
        self.source = source
        self.target = target
        self.matrix = matrix

    @classmethod
    def identity(cls, G: FgAbGroup) -> "GroupHom":
        return cls(G, G, IntMatrix.identity(G.ngens))

    @classmethod
    def zero(cls, source: FgAbGroup, target: FgAbGroup) -> "GroupHom":
        return cls(source, target, IntMatrix(target.ngens, source.ngens))

    def __call__(self, v: dict) -> dict:
        return self.matrix.apply(v)

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """``self ∘ inner``."""
        return GroupHom(inner.source, self.target, self.matrix @ inner.matrix)

    def __matmul__(self, inner: "GroupHom") -> "GroupHom":
        return self.compose(inner)

    def __add__(self, other: "GroupHom") -> "GroupHom":
        return GroupHom(self.source, self.target, self.matrix + other.matrix)

    def __sub__(self, other: "GroupHom") -> "GroupHom":
        return GroupHom(self.source, self.target, self.matrix - other.matrix)

    def __neg__(self) -> "GroupHom":
        return GroupHom(self.source, self.target, -self.matrix)

    def is_well_defined(self) -> bool:
        img = self.matrix @ self.source.relations
        return all(self.target.is_zero_element(c) for c in img.columns())

    def is_zero(self) -> bool:
        return all(self.target.is_zero_element(c) for c in self.matrix.columns())

    def equals(self, other: "GroupHom") -> bool:
        return (self - other).is_zero()

    def is_injective(self) -> bool:
        return kernel(self)[0].is_trivial()

    def is_surjective(self) -> bool:
        return cokernel(self)[0].is_trivial()

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "matrix": self.matrix.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GroupHom":
        return cls(
            FgAbGroup.from_json(obj["source"]),
            FgAbGroup.from_json(obj["target"]),
            IntMatrix.from_json(obj["matrix"]),
        )

    def __repr__(self):
        return f"GroupHom({self.source.describe()} -> {self.target.describe()})"


class PreimageLattice:
    """``{x in Z^n : every row block of M x vanishes in its target group}``.

    ``blocks`` is a list of ``(rows, target)`` where ``rows`` holds one
    sparse row (dict over the ``n`` variables) per generator of
    ``target``.  Torsion in a target becomes congruences carried by
    auxiliary variables; the projection away from them is injective, so
    projected kernel vectors stay a basis.
    """

    def __init__(self, dim: int, blocks):
        self.dim = dim
        rows, aux = [], []
        for block_rows, target in blocks:
            if len(block_rows) != target.ngens:
                raise ValueError("row block does not match its target group")
            if not target.relations.cols:
                rows.extend(r for r in block_rows if r)
                continue
            U, diag = target._smith_rows
            for i, d in enumerate(diag):
                if d == 1:
                    continue
                row: dict = {}
                for t, u in U[i].items():
                    for j, v in block_rows[t].items():
                        nv = row.get(j, 0) + u * v
                        if nv:
                            row[j] = nv
                        else:
                            row.pop(j, None)
                if d:
                    if not row:
                        continue
                    aux.append((dict(row), d))
                    row[dim + len(aux) - 1] = -d
                if row:
                    rows.append(row)
        width = dim + len(aux)
        cols = [{} for _ in range(width)]
        for r, row in enumerate(rows):
            for j, v in row.items():
                cols[j][r] = v
        self._aux = aux
        self._lat = kernel_lattice(IntMatrix(len(rows), width, cols))
        if aux:
            self.basis = [{j: v for j, v in b.items() if j < dim} for b in self._lat.basis]
        else:
            self.basis = self._lat.basis

    @classmethod
    def of_matrix(cls, M: IntMatrix, target: FgAbGroup) -> "PreimageLattice":
        return cls(M.cols, [(M.row_dicts(), target)])

    def __len__(self):
        return len(self.basis)

    def matrix(self) -> IntMatrix:
        return IntMatrix(self.dim, len(self.basis), self.basis)

    def coords(self, v: dict) -> dict:
        if not self._aux:
            return self._lat.coords(v)
        full = dict(v)
        for k, (row, d) in enumerate(self._aux):
            s = sum(c * v.get(j, 0) for j, c in row.items())
            q, r = divmod(s, d)
            if r:
                raise ValueError("vector is not in the preimage lattice")
            if q:
                full[self.dim + k] = q
        return self._lat.coords(full)


def kernel(f: GroupHom) -> tuple[FgAbGroup, GroupHom]:
    """Kernel with its (injective) inclusion into ``f.source``."""
    lat = PreimageLattice.of_matrix(f.matrix, f.target)
    k = len(lat)
    rels = [lat.coords(c) for c in f.source.relations.columns()]
    K = FgAbGroup(k, IntMatrix(k, len(rels), rels))
    return K, GroupHom(K, f.source, lat.matrix())


def cokernel(f: GroupHom) -> tuple[FgAbGroup, GroupHom]:
    """Cokernel: target relations augmented by the image columns."""
    T = f.target
    C = FgAbGroup(T.ngens, hstack([T.relations, f.matrix], rows=T.ngens))
    return C, GroupHom(T, C, IntMatrix.identity(T.ngens))


class Lifter:
    """Lift elements of ``target`` through an injective ``inclusion: K -> target``."""

    def __init__(self, inclusion: GroupHom):
        self.inclusion = inclusion
        T = inclusion.target
        self._k = inclusion.source.ngens
        self._solver = Echelon(hstack([inclusion.matrix, T.relations], rows=T.ngens))

    def lift(self, y: dict) -> Optional[dict]:
        x = self._solver.solve(y)
        if x is None:
            return None
        return {j: v for j, v in x.items() if j < self._k}


def factor_through(g: GroupHom, inclusion: GroupHom) -> GroupHom:
    """The map ``h`` with ``inclusion ∘ h == g``; raises if ``g`` does not land in the image."""
    lifter = Lifter(inclusion)
    cols = []
    for c in g.matrix.columns():
        x = lifter.lift(c)
        if x is None:
            raise ValueError("map does not factor through the inclusion")
        cols.append(x)
    return GroupHom(g.source, inclusion.source, IntMatrix(inclusion.source.ngens, len(cols), cols))


def direct_sum(groups: Sequence[FgAbGroup]) -> FgAbGroup:
    n = sum(G.ngens for G in groups)
    return FgAbGroup(n, block_diag([G.relations for G in groups]) if groups else IntMatrix(0, 0))


def direct_sum_hom(maps: Sequence[GroupHom]) -> GroupHom:
    return GroupHom(
        direct_sum([m.source for m in maps]),
        direct_sum([m.target for m in maps]),
        block_diag([m.matrix for m in maps]),
    )


def tensor_group(G: FgAbGroup, H: FgAbGroup) -> FgAbGroup:
    """Generator ``(i, j)`` of ``G ⊗ H`` sits at index ``i * H.ngens + j``."""
    g, h = G.ngens, H.ngens
    rels = hstack(
        [kron(G.relations, IntMatrix.identity(h)), kron(IntMatrix.identity(g), H.relations)],
        rows=g * h,
    )
    return FgAbGroup(g * h, rels)


def tensor_hom(f: GroupHom, g: GroupHom) -> GroupHom:
    return GroupHom(
        tensor_group(f.source, g.source),
        tensor_group(f.target, g.target),
        kron(f.matrix, g.matrix),
    )


def multiplication(G: FgAbGroup, d: int) -> GroupHom:
    return GroupHom(G, G, IntMatrix.identity(G.ngens).scale(d))


class HomGroup:
    """``Hom(G, H)`` as a presented group with concrete generating homs."""

    def __init__(self, G: FgAbGroup, H: FgAbGroup):
        self.source, self.target = G, H
        summands, coord = G.smith_basis
        self._coord = coord
        self._parts = []
        groups, basis = [], []
        coord_rows = coord.row_dicts()
        # reduce images mod single-generator relations, so g->3g rather than g->-3g
        orders = {}
        for col in H.relations.columns():
            if len(col) == 1:
                (t, e), = col.items()
                e = abs(e)
                orders[t] = e if t not in orders else gcd(orders[t], e)
        for i, (d, vec) in enumerate(summands):
            if d == 0:
                K, inc = H, GroupHom.identity(H)
            else:
                K, inc = kernel(multiplication(H, d))
            self._parts.append((vec, inc))
            groups.append(K)
            row = coord_rows[i]
            for c in inc.matrix.columns():
                cols = [{} for _ in range(G.ngens)]
                for j, u in row.items():
                    img = {}
                    for t, y in c.items():
                        v = u * y % orders[t] if orders.get(t) else u * y
                        if v:
                            img[t] = v
                    cols[j] = img
                basis.append(GroupHom(G, H, IntMatrix(H.ngens, G.ngens, cols)))
        self.group = direct_sum(groups)
        self.basis = basis

    def coords(self, phi: GroupHom) -> dict:
        out, off = {}, 0
        for vec, inc in self._parts:
            y = phi.matrix.apply(vec)
            z = Lifter(inc).lift(y)
            if z is None:
                raise ValueError("not a homomorphism of the given groups")
            for j, v in z.items():
                out[off + j] = v
            off += inc.source.ngens
        return out


def hom_group(G: FgAbGroup, H: FgAbGroup) -> tuple[FgAbGroup, list]:
    hg = HomGroup(G, H)
    return hg.group, hg.basis


def solve_presentation(R: IntMatrix, b: Sequence[int] | dict) -> Optional[list]:
    """Integer ``x`` with ``R x = b``, or ``None`` when ``b`` is not in the column span."""
    if not isinstance(b, dict):
        if len(b) != R.rows:
            raise ValueError("dimension mismatch")
        b = {i: int(v) for i, v in enumerate(b) if v}
    x = Echelon(R).solve(b)
    if x is None:
        return None
    return [x.get(j, 0) for j in range(R.cols)]


__all__ = [
    "FgAbGroup",
    "GroupHom",
    "HomGroup",
    "Lifter",
    "PreimageLattice",
    "canonical_form",
    "cokernel",
    "direct_sum",
    "direct_sum_hom",
    "factor_through",
    "hom_group",
    "kernel",
    "multiplication",
    "solve_presentation",
    "tensor_group",
    "tensor_hom",
]
