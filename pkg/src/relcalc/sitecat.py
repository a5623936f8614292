"""Finite categories, functors into f.g. abelian groups, and natural transformations.

The functor category here is the ambient abelian category of the
relative constructions in :mod:`relcalc.relres`; the pointed-set windows
``gamma_window(N)`` are the sites used by :mod:`relcalc.calculus`.
"""

from __future__ import annotations

from functools import cached_property
from itertools import product
from typing import Callable, Hashable, NamedTuple, Optional, Sequence

from .exactlin import (
    FgAbGroup,
    GroupHom,
    IntMatrix,
    PreimageLattice,
    direct_sum,
    direct_sum_hom,
    tensor_group,
    tensor_hom,
)


class CategoryError(ValueError):
    pass


# ---------------------------------------------------------------------------
# finite categories


class CoproductData:
    """Partial binary coproducts ``a ∨ b`` given by a table.

    ``table[(a, b)] = (obj, inj_left, inj_right)``.  Copairing is found by
    searching ``Hom(a ∨ b, c)``, which is fine for the small categories
    this class is meant for; :class:`GammaWindow` computes it directly.
    """

    def __init__(self, table: dict):
        self.table = dict(table)

    def wedge(self, a, b):
        entry = self.table.get((a, b))
        return None if entry is None else entry[0]

    def injections(self, a, b):
        entry = self.table[(a, b)]
        return entry[1], entry[2]

    def copair(self, cat: "FinCat", f, g):
        a, b = cat.source(f), cat.source(g)
        c = cat.target(f)
        if cat.target(g) != c:
            raise CategoryError("copairing needs a common target")
        w = self.wedge(a, b)
        if w is None:
            raise CategoryError(f"coproduct of {a!r} and {b!r} is not defined")
        il, ir = self.injections(a, b)
        hits = [h for h in cat.hom(w, c) if cat.compose(h, il) == f and cat.compose(h, ir) == g]
        if len(hits) != 1:
            raise CategoryError(f"copairing of {f!r}, {g!r} is not unique ({len(hits)} candidates)")
        return hits[0]


class FinCat:
    """A finite category given by hom lists and a composition table.

    ``compose`` maps ``(g, f)`` to ``g ∘ f``; ``source``/``target`` of each
    morphism are recovered from the hom lists.
    """

    def __init__(
        self,
        objects: Sequence[Hashable],
        homs: dict,
        compose: dict,
        identities: dict,
        zero: Hashable | None = None,
        coproducts: CoproductData | None = None,
        name: str = "C",
    ):
        self.objects = list(objects)
        self._homs = {k: list(v) for k, v in homs.items()}
        self._compose = dict(compose)
        self._identities = dict(identities)
        self.zero = zero
        self.coproducts = coproducts
        self.name = name
        self._src: dict = {}
        self._tgt: dict = {}
        for (a, b), ms in self._homs.items():
            for m in ms:
                self._src[m] = a
                self._tgt[m] = b

    # ---- structure -----------------------------------------------------
    def hom(self, a, b) -> list:
        return self._homs.get((a, b), [])

    def source(self, m):
        return self._src[m]

    def target(self, m):
        return self._tgt[m]

    def identity(self, a):
        return self._identities[a]

    def compose(self, g, f):
        """``g ∘ f``."""
        try:
            return self._compose[(g, f)]
        except KeyError:
            raise CategoryError(f"composite {g!r} ∘ {f!r} missing from the table") from None

    def has_object(self, a) -> bool:
        return a in self._index_objects

    @cached_property
    def _index_objects(self):
        return set(self.objects)

    @cached_property
    def _hom_index(self) -> dict:
        return {m: k for ms in self._homs.values() for k, m in enumerate(ms)}

    def index_of(self, m) -> int:
        """Position of ``m`` in its hom list (the fixed enumeration order)."""
        return self._hom_index[m]

    def morphisms(self) -> list:
        return [m for a in self.objects for b in self.objects for m in self.hom(a, b)]

    def zero_map(self, a, b):
        """The morphism ``a -> 0 -> b``."""
        if self.zero is None:
            raise CategoryError("category has no zero object")
        z = self.zero
        return self.compose(self.hom(z, b)[0], self.hom(a, z)[0])

    @cached_property
    def generating_morphisms(self) -> list:
        """A set of morphisms whose composites give every non-identity morphism.

        Naturality only needs checking on these.  Chosen greedily in a fixed
        order, so the result is deterministic.
        """
        ident = {self.identity(a) for a in self.objects}
        order = sorted(
            (m for m in self.morphisms() if m not in ident),
            key=lambda m: (self._distance(m), self.objects.index(self.source(m)),
                           self.objects.index(self.target(m)), self.index_of(m)),
        )
        closure = set(ident)
        by_src: dict = {}
        by_tgt: dict = {}

        def add(x):
            closure.add(x)
            by_src.setdefault(self.source(x), []).append(x)
            by_tgt.setdefault(self.target(x), []).append(x)

        for x in ident:
            add(x)
        gens = []
        for m in order:
            if m in closure:
                continue
            gens.append(m)
            queue = [m]
            while queue:
                x = queue.pop()
                if x in closure:
                    continue
                add(x)
                for y in list(by_src.get(self.target(x), [])):
                    queue.append(self.compose(y, x))
                for y in list(by_tgt.get(self.source(x), [])):
                    queue.append(self.compose(x, y))
        return gens

    def _distance(self, m):
        return 0

    # ---- validation ----------------------------------------------------
    def validate(self) -> "ValidationReport":
        return validate_category(self)

    # ---- JSON ----------------------------------------------------------
    def to_json(self) -> dict:
        name = {m: self.morphism_name(m) for m in self.morphisms()}
        obj = {
            "objects": [str(a) for a in self.objects],
            "homs": [
                {"source": str(a), "target": str(b), "morphisms": [name[m] for m in self.hom(a, b)]}
                for a in self.objects
                for b in self.objects
            ],
            "composition": [
                [name[g], name[f], name[self.compose(g, f)]]
                for a in self.objects
                for b in self.objects
                for c in self.objects
                for f in self.hom(a, b)
                for g in self.hom(b, c)
            ],
            "identities": {str(a): name[self.identity(a)] for a in self.objects},
            "zero": None if self.zero is None else str(self.zero),
            "coproducts": [],
        }
        if self.coproducts is not None:
            for (a, b), (w, il, ir) in sorted(self.coproducts.table.items(), key=str):
                obj["coproducts"].append(
                    {"left": str(a), "right": str(b), "object": str(w),
                     "inj_left": name[il], "inj_right": name[ir]}
                )
        return obj

    def morphism_name(self, m) -> str:
        return str(m)

    @classmethod
    def from_json(cls, obj: dict) -> "FinCat":
        homs = {(h["source"], h["target"]): list(h["morphisms"]) for h in obj["homs"]}
        compose = {(g, f): h for g, f, h in obj["composition"]}
        cop = None
        if obj.get("coproducts"):
            cop = CoproductData(
                {(c["left"], c["right"]): (c["object"], c["inj_left"], c["inj_right"])
                 for c in obj["coproducts"]}
            )
        return cls(obj["objects"], homs, compose, obj["identities"], obj.get("zero"), cop)


class ValidationReport(NamedTuple):
    ok: bool
    violations: list

    def __bool__(self):
        return self.ok


def validate_category(C: FinCat) -> ValidationReport:
    """Exhaustive identity, associativity and zero-object check."""
    bad = []
    for a in C.objects:
        ida = C.identity(a)
        if ida not in C.hom(a, a):
            bad.append(f"identity of {a!r} is not an endomorphism")
    for a in C.objects:
        for b in C.objects:
            for f in C.hom(a, b):
                try:
                    if C.compose(C.identity(b), f) != f or C.compose(f, C.identity(a)) != f:
                        bad.append(f"identity law fails for {C.morphism_name(f)}")
                except CategoryError as e:
                    bad.append(str(e))
    for a in C.objects:
        for b in C.objects:
            for f in C.hom(a, b):
                for c in C.objects:
                    for g in C.hom(b, c):
                        try:
                            gf = C.compose(g, f)
                        except CategoryError as e:
                            bad.append(str(e))
                            continue
                        if C.source(gf) != a or C.target(gf) != c:
                            bad.append(f"composite {C.morphism_name(g)} ∘ {C.morphism_name(f)} has wrong ends")
                            continue
                        for d in C.objects:
                            for h in C.hom(c, d):
                                try:
                                    lhs = C.compose(h, gf)
                                    rhs = C.compose(C.compose(h, g), f)
                                except CategoryError as e:
                                    bad.append(str(e))
                                    continue
                                if lhs != rhs:
                                    bad.append(
                                        "associativity fails on triple "
                                        f"({C.morphism_name(h)}, {C.morphism_name(g)}, {C.morphism_name(f)})"
                                    )
    if C.zero is not None:
        for a in C.objects:
            if len(C.hom(a, C.zero)) != 1 or len(C.hom(C.zero, a)) != 1:
                bad.append(f"{C.zero!r} is not a zero object for {a!r}")
    if C.coproducts is not None:
        for (a, b) in C.coproducts.table:
            il, ir = C.coproducts.injections(a, b)
            for c in C.objects:
                for f in C.hom(a, c):
                    for g in C.hom(b, c):
                        try:
                            h = C.coproducts.copair(C, f, g)
                        except CategoryError as e:
                            bad.append(str(e))
                            continue
                        if C.compose(h, il) != f or C.compose(h, ir) != g:
                            bad.append(f"copairing fails for ({a!r}, {b!r})")
    return ValidationReport(not bad, bad)


class PMap(NamedTuple):
    """Pointed map ``[src] -> [tgt]``; ``images[k]`` is the image of point ``k+1`` (0 = basepoint)."""

    src: int
    tgt: int
    images: tuple

    def __call__(self, x: int) -> int:
        return 0 if x == 0 else self.images[x - 1]

    def __str__(self):
        return f"{self.src}->{self.tgt}:{''.join(map(str, self.images)) or '-'}"


def pmap_compose(g: PMap, f: PMap) -> PMap:
    if f.tgt != g.src:
        raise CategoryError(f"cannot compose {g} after {f}")
    gi = g.images
    return PMap(f.src, g.tgt, tuple(0 if v == 0 else gi[v - 1] for v in f.images))


def pmap_identity(n: int) -> PMap:
    return PMap(n, n, tuple(range(1, n + 1)))


def pmap_zero(a: int, b: int) -> PMap:
    return PMap(a, b, (0,) * a)


def pointed_maps(a: int, b: int) -> list:
    """All pointed maps ``[a] -> [b]`` in lexicographic order of image tuples."""
    return [PMap(a, b, imgs) for imgs in product(range(b + 1), repeat=a)]


def wedge_blocks(sizes: Sequence[int]) -> list:
    """Point ranges of the summands of ``[a_1] ∨ ... ∨ [a_k]`` (blocks are contiguous)."""
    out, off = [], 0
    for a in sizes:
        out.append(range(off + 1, off + a + 1))
        off += a
    return out


def copair_maps(maps: Sequence[PMap]) -> PMap:
    tgt = maps[0].tgt
    if any(m.tgt != tgt for m in maps):
        raise CategoryError("copairing needs a common target")
    imgs = tuple(v for m in maps for v in m.images)
    return PMap(len(imgs), tgt, imgs)


def block_collapse(sizes: Sequence[int], r: int, keep_object: bool = True) -> PMap:
    """Send block ``r`` of ``[a_1] ∨ ... ∨ [a_k]`` to the basepoint.

    With ``keep_object`` the map is an endomorphism of the wedge; otherwise
    the target is the wedge with block ``r`` removed.
    """
    s = sum(sizes)
    blocks = wedge_blocks(sizes)
    if keep_object:
        imgs = tuple(0 if x in blocks[r] else x for x in range(1, s + 1))
        return PMap(s, s, imgs)
    imgs, nxt = [], 1
    for k, blk in enumerate(blocks):
        for _ in blk:
            if k == r:
                imgs.append(0)
            else:
                imgs.append(nxt)
                nxt += 1
    return PMap(s, s - sizes[r], tuple(imgs))


def fold_map(n: int, copies: int) -> PMap:
    """Codiagonal ``[n]^{∨copies} -> [n]``."""
    return PMap(n * copies, n, tuple(range(1, n + 1)) * copies)


class GammaCoproducts(CoproductData):
    def __init__(self, N: int):
        self.N = N

    @property
    def table(self):
        out = {}
        for a in range(self.N + 1):
            for b in range(self.N + 1 - a):
                il = PMap(a, a + b, tuple(range(1, a + 1)))
                ir = PMap(b, a + b, tuple(range(a + 1, a + b + 1)))
                out[(a, b)] = (a + b, il, ir)
        return out

    def wedge(self, a, b):
        return a + b if a + b <= self.N else None

    def injections(self, a, b):
        if a + b > self.N:
            raise CategoryError(f"[{a}] ∨ [{b}] lies outside the window")
        return PMap(a, a + b, tuple(range(1, a + 1))), PMap(b, a + b, tuple(range(a + 1, a + b + 1)))

    def copair(self, cat, f, g):
        if f.src + g.src > self.N:
            raise CategoryError(f"[{f.src}] ∨ [{g.src}] lies outside the window")
        return copair_maps([f, g])

    def fold(self, a):
        return fold_map(a, 2)

    def collapse(self, a, b, side: int):
        return block_collapse([a, b], side, keep_object=False)


class GammaWindow(FinCat):
    """Finite pointed sets ``[0], ..., [N]`` with ``[m] = {0, 1, ..., m}`` based at 0."""

    def __init__(self, N: int):
        if N < 1:
            raise CategoryError("window size must be at least 1")
        self.N = N
        self.objects = list(range(N + 1))
        self.zero = 0
        self.coproducts = GammaCoproducts(N)
        self.name = f"Gamma_{N}"

    @cached_property
    def _hom_lists(self):
        return {(a, b): pointed_maps(a, b) for a in self.objects for b in self.objects}

    def hom(self, a, b):
        return self._hom_lists.get((a, b), [])

    def source(self, m):
        return m.src

    def target(self, m):
        return m.tgt

    def identity(self, a):
        return pmap_identity(a)

    def compose(self, g, f):
        return pmap_compose(g, f)

    def has_object(self, a) -> bool:
        return isinstance(a, int) and 0 <= a <= self.N

    def index_of(self, m) -> int:
        # lexicographic order of image tuples = base-(tgt+1) digits
        k = 0
        for v in m.images:
            k = k * (m.tgt + 1) + v
        return k

    def zero_map(self, a, b):
        return pmap_zero(a, b)

    def _distance(self, m) -> tuple:
        # small objects first, so maps factoring through them are not picked
        return (max(m.src, m.tgt), m.src == m.tgt)

    def morphism_name(self, m) -> str:
        return str(m)

    def wedge(self, sizes: Sequence[int]) -> int:
        s = sum(sizes)
        if s > self.N:
            raise CategoryError(f"wedge of {tuple(sizes)} needs window {s} > {self.N}")
        return s


def gamma_window(N: int) -> GammaWindow:
    return GammaWindow(N)


# ---------------------------------------------------------------------------
# functors and natural transformations


class DiagFunctor:
    """A functor from a finite category to presented abelian groups.

    Values and actions are produced by callables and cached; caches only
    memoise pure results.
    """

    def __init__(self, category: FinCat, value: Callable, action: Callable, name: str = "F"):
        self.category = category
        self._value_fn = value
        self._action_fn = action
        self._values: dict = {}
        self._actions: dict = {}
        self.name = name

    def value(self, a) -> FgAbGroup:
        v = self._values.get(a)
        if v is None:
            if not self.category.has_object(a):
                raise CategoryError(f"unknown object {a!r}")
            v = self._value_fn(a)
            self._values[a] = v
        return v

    def act(self, m) -> GroupHom:
        h = self._actions.get(m)
        if h is None:
            h = self._action_fn(m)
            self._actions[m] = h
        return h

    __call__ = value

    def validate(self, exhaustive: bool = True) -> ValidationReport:
        """Functoriality: identities and (all or generator-adjacent) composites."""
        C = self.category
        bad = []
        for a in C.objects:
            if not self.act(C.identity(a)).equals(GroupHom.identity(self.value(a))):
                bad.append(f"{self.name} does not preserve the identity of {a!r}")
        for m in C.morphisms():
            if not self.act(m).is_well_defined():
                bad.append(f"{self.name}({C.morphism_name(m)}) is not well defined")
        firsts = C.morphisms() if exhaustive else C.generating_morphisms
        for f in firsts:
            b = C.target(f)
            for c in C.objects:
                for g in C.hom(b, c):
                    lhs = self.act(C.compose(g, f))
                    rhs = self.act(g) @ self.act(f)
                    if not lhs.equals(rhs):
                        bad.append(
                            f"{self.name} fails on {C.morphism_name(g)} ∘ {C.morphism_name(f)}"
                        )
        return ValidationReport(not bad, bad)

    def to_json(self) -> dict:
        C = self.category
        return {
            "category": C.name,
            "values": {str(a): self.value(a).to_json() for a in C.objects},
            "maps": [
                {"morphism": C.morphism_name(m), "matrix": self.act(m).matrix.to_json()}
                for m in C.morphisms()
            ],
        }

    @classmethod
    def from_json(cls, category: FinCat, obj: dict, name: str = "F") -> "DiagFunctor":
        by_name = {category.morphism_name(m): m for m in category.morphisms()}
        obj_by_name = {str(a): a for a in category.objects}
        vals = {obj_by_name[k]: FgAbGroup.from_json(v) for k, v in obj["values"].items()}
        mats = {by_name[e["morphism"]]: IntMatrix.from_json(e["matrix"]) for e in obj["maps"]}

        def action(m):
            return GroupHom(vals[category.source(m)], vals[category.target(m)], mats[m])

        return cls(category, vals.__getitem__, action, name)

    def __repr__(self):
        return f"DiagFunctor({self.name} on {self.category.name})"


class NatTransform:
    """Components ``source(a) -> target(a)`` given as matrices per object.

    ``components`` may be a dict or a callable ``a -> matrix``; callables
    are evaluated on demand and cached.
    """

    def __init__(self, source: DiagFunctor, target: DiagFunctor, components):
        self.source = source
        self.target = target
        self._fn = components if callable(components) else components.get
        self._cache: dict = {}

    def matrix(self, a) -> IntMatrix:
        M = self._cache.get(a)
        if M is None:
            M = self._fn(a)
            if M is None:
                M = IntMatrix(self.target.value(a).ngens, self.source.value(a).ngens)
            elif isinstance(M, GroupHom):
                M = M.matrix
            self._cache[a] = M
        return M

    @property
    def components(self) -> dict:
        return {a: self.matrix(a) for a in self.source.category.objects}

    def component(self, a) -> GroupHom:
        return GroupHom(self.source.value(a), self.target.value(a), self.matrix(a))

    def is_natural(self, exhaustive: bool = False) -> bool:
        C = self.source.category
        ms = C.morphisms() if exhaustive else C.generating_morphisms
        for m in ms:
            a, b = C.source(m), C.target(m)
            lhs = self.target.act(m) @ self.component(a)
            rhs = self.component(b) @ self.source.act(m)
            if not lhs.equals(rhs):
                return False
        return all(self.component(a).is_well_defined() for a in C.objects)

    def compose(self, inner: "NatTransform") -> "NatTransform":
        """``self ∘ inner``."""
        return NatTransform(inner.source, self.target, lambda a: self.matrix(a) @ inner.matrix(a))

    def __matmul__(self, inner):
        return self.compose(inner)

    def _objects(self):
        return self.source.category.objects

    def is_zero(self) -> bool:
        return all(self.component(a).is_zero() for a in self._objects())

    def is_iso(self) -> bool:
        return all(self.component(a).is_isomorphism() for a in self._objects())

    def is_epi(self) -> bool:
        return all(self.component(a).is_surjective() for a in self._objects())


def identity_transform(F: DiagFunctor) -> NatTransform:
    return NatTransform(F, F, {a: IntMatrix.identity(F.value(a).ngens) for a in F.category.objects})


def zero_functor(C: FinCat) -> DiagFunctor:
    return constant_functor(C, FgAbGroup.trivial())


def constant_functor(C: FinCat, G: FgAbGroup, name: str | None = None) -> DiagFunctor:
    ident = GroupHom.identity(G)
    return DiagFunctor(C, lambda a: G, lambda m: ident, name or f"const({G.describe()})")


def representable(C: FinCat, a, reduced: bool = False) -> DiagFunctor:
    """``h_a = Z[Hom(a, -)]``, or its reduced summand ``h̄_a``.

    The reduced basis at ``b`` is ``u - z`` over nonzero ``u: a -> b``,
    where ``z`` is the through-zero morphism; postcomposition sends it to
    ``f∘u - z`` (zero when ``f∘u == z``).
    """
    if not C.has_object(a):
        raise CategoryError(f"unknown object {a!r}")
    if reduced and C.zero is None:
        raise CategoryError("reduced representables need a zero object")

    def basis(b):
        ms = C.hom(a, b)
        if reduced:
            z = C.zero_map(a, b)
            ms = [u for u in ms if u != z]
        return ms

    bases: dict = {}

    def get_basis(b):
        if b not in bases:
            ms = basis(b)
            bases[b] = (ms, {u: k for k, u in enumerate(ms)})
        return bases[b]

    def value(b):
        return FgAbGroup.free(len(get_basis(b)[0]))

    def action(m):
        src, tgt = C.source(m), C.target(m)
        ms, _ = get_basis(src)
        _, pos = get_basis(tgt)
        cols = []
        for u in ms:
            k = pos.get(C.compose(m, u))
            cols.append({} if k is None else {k: 1})
        return GroupHom(F.value(src), F.value(tgt), IntMatrix(len(pos), len(ms), cols))

    label = f"hbar_{a}" if reduced else f"h_{a}"
    F = DiagFunctor(C, value, action, label)
    F.basis = lambda b: get_basis(b)[0]
    return F


def reduced_inclusion(C: FinCat, a) -> NatTransform:
    """The subfunctor inclusion ``h̄_a -> h_a``."""
    hb, h = representable(C, a, True), representable(C, a, False)
    comps = {}
    for b in C.objects:
        z = C.zero_map(a, b)
        idx = {u: k for k, u in enumerate(h.basis(b))}
        cols = [{idx[u]: 1, idx[z]: -1} for u in hb.basis(b)]
        comps[b] = IntMatrix(len(idx), len(cols), cols)
    return NatTransform(hb, h, comps)


def splitting_map(C: FinCat, a) -> NatTransform:
    """``h̄_a ⊕ Z -> h_a``: the reduced inclusion plus ``1 ↦ [a -> 0 -> b]``."""
    inc = reduced_inclusion(C, a)
    S = combine(inc.source, constant_functor(C, FgAbGroup.free(1)), "sum")
    comps = {}
    for b in C.objects:
        M = inc.matrix(b)
        idx = {u: k for k, u in enumerate(inc.target.basis(b))}
        cols = list(M.columns()) + [{idx[C.zero_map(a, b)]: 1}]
        comps[b] = IntMatrix(M.rows, len(cols), cols)
    return NatTransform(S, inc.target, comps)


def combine(F: DiagFunctor, G: DiagFunctor, mode: str) -> DiagFunctor:
    """Pointwise direct sum (``"sum"``/``"⊕"``) or tensor product (``"tensor"``/``"⊗"``)."""
    if F.category is not G.category:
        raise CategoryError("functors live on different categories")
    C = F.category
    if mode in ("sum", "⊕", "+"):
        return DiagFunctor(
            C,
            lambda a: direct_sum([F.value(a), G.value(a)]),
            lambda m: direct_sum_hom([F.act(m), G.act(m)]),
            f"({F.name} + {G.name})",
        )
    if mode in ("tensor", "⊗", "*"):
        return DiagFunctor(
            C,
            lambda a: tensor_group(F.value(a), G.value(a)),
            lambda m: tensor_hom(F.act(m), G.act(m)),
            f"({F.name} ⊗ {G.name})",
        )
    raise ValueError(f"unknown combine mode {mode!r}")


def copairing_transform(C: FinCat, a, b) -> NatTransform:
    """``h_a ⊗ h_b -> h_{a ∨ b}``, ``u ⊗ v ↦ [u, v]``."""
    if C.coproducts is None or C.coproducts.wedge(a, b) is None:
        raise CategoryError(f"coproduct of {a!r} and {b!r} is not available")
    w = C.coproducts.wedge(a, b)
    ha, hb, hw = representable(C, a), representable(C, b), representable(C, w)
    T = combine(ha, hb, "tensor")
    comps = {}
    for c in C.objects:
        idx = {u: k for k, u in enumerate(hw.basis(c))}
        cols = [{idx[C.coproducts.copair(C, u, v)]: 1} for u in ha.basis(c) for v in hb.basis(c)]
        comps[c] = IntMatrix(len(idx), len(cols), cols)
    return NatTransform(T, hw, comps)


class NatHom:
    """``Hom(F, G)`` in the functor category.

    Computed as the lattice of component tuples satisfying well-definedness
    and naturality on the generating morphisms, modulo tuples that vanish
    in ``G``.  Unpacks as ``(group, basis)``.
    """

    def __init__(self, F: DiagFunctor, G: DiagFunctor):
        if F.category is not G.category:
            raise CategoryError("functors live on different categories")
        C = F.category
        self.source, self.target = F, G
        offs, n = {}, 0
        shapes = {}
        for a in C.objects:
            r, c = G.value(a).ngens, F.value(a).ngens
            offs[a] = n
            shapes[a] = (r, c)
            n += r * c
        self._offs, self._shapes, self.dim = offs, shapes, n

        def var(a, p, q):
            return offs[a] + p * shapes[a][1] + q

        blocks = []
        for a in C.objects:
            r, c = shapes[a]
            RF = F.value(a).relations
            Ga = G.value(a)
            for col in RF.columns():
                rows = [{} for _ in range(r)]
                for q, v in col.items():
                    for p in range(r):
                        rows[p][var(a, p, q)] = v
                blocks.append((rows, Ga))
        for m in C.generating_morphisms:
            a, b = C.source(m), C.target(m)
            Gm, Fm = G.act(m).matrix, F.act(m).matrix
            rb = shapes[b][0]
            Gb = G.value(b)
            for q in range(shapes[a][1]):
                rows = [{} for _ in range(rb)]
                for t, gcol in enumerate(Gm.columns()):
                    x = var(a, t, q)
                    for i, v in gcol.items():
                        rows[i][x] = rows[i].get(x, 0) + v
                for rr, v in Fm.column(q).items():
                    for i in range(rb):
                        y = var(b, i, rr)
                        nv = rows[i].get(y, 0) - v
                        if nv:
                            rows[i][y] = nv
                        else:
                            rows[i].pop(y, None)
                blocks.append((rows, Gb))
        self._lat = PreimageLattice(n, blocks)
        k = len(self._lat)
        rels = []
        for a in C.objects:
            r, c = shapes[a]
            for col in G.value(a).relations.columns():
                for q in range(c):
                    rels.append(self._lat.coords({var(a, p, q): v for p, v in col.items()}))
        self.group = FgAbGroup(k, IntMatrix(k, len(rels), rels))
        self.basis = [self.transform(vec) for vec in self._lat.basis]

    def __iter__(self):
        return iter((self.group, self.basis))

    def transform(self, vec: dict) -> NatTransform:
        """The transformation with flattened component entries ``vec``."""
        C = self.source.category
        comps = {}
        for a in C.objects:
            r, c = self._shapes[a]
            o = self._offs[a]
            cols = [{} for _ in range(c)]
            for j, v in vec.items():
                if o <= j < o + r * c:
                    p, q = divmod(j - o, c)
                    cols[q][p] = v
            comps[a] = IntMatrix(r, c, cols)
        return NatTransform(self.source, self.target, comps)

    def flatten(self, t: NatTransform) -> dict:
        out = {}
        for a, M in t.components.items():
            o, c = self._offs[a], self._shapes[a][1]
            for q, col in enumerate(M.columns()):
                for p, v in col.items():
                    out[o + p * c + q] = v
        return out

    def coords(self, t: NatTransform) -> dict:
        """Coordinates of a natural transformation in terms of ``basis``."""
        return self._lat.coords(self.flatten(t))


def nat_hom(F: DiagFunctor, G: DiagFunctor) -> NatHom:
    return NatHom(F, G)


class YonedaWitness(NamedTuple):
    hom: NatHom
    to_value: GroupHom
    from_value: GroupHom

    def round_trips(self) -> bool:
        H = self.hom.group
        Fa = self.to_value.target
        return (self.to_value @ self.from_value).equals(GroupHom.identity(Fa)) and (
            self.from_value @ self.to_value
        ).equals(GroupHom.identity(H))


def yoneda_witness(C: FinCat, a, F: DiagFunctor) -> YonedaWitness:
    """Mutually inverse maps between ``Hom(h_a, F)`` and ``F(a)``."""
    h = representable(C, a)
    H = NatHom(h, F)
    Fa = F.value(a)
    id_pos = h.basis(a).index(C.identity(a))
    to_cols = [t.matrix(a).column(id_pos) for t in H.basis]
    to_value = GroupHom(H.group, Fa, IntMatrix(Fa.ngens, len(to_cols), to_cols))
    from_cols = []
    for i in range(Fa.ngens):
        e = {i: 1}
        comps = {}
        for b in C.objects:
            cols = [F.act(u).matrix.apply(e) for u in h.basis(b)]
            comps[b] = IntMatrix(F.value(b).ngens, len(cols), cols)
        from_cols.append(H.coords(NatTransform(h, F, comps)))
    from_value = GroupHom(Fa, H.group, IntMatrix(H.group.ngens, len(from_cols), from_cols))
    return YonedaWitness(H, to_value, from_value)


def cross_effect_of(F, sizes: Sequence[int], keep_object: bool = False):
    """``cr_k F(a_1, ..., a_k)`` as the joint kernel of the block collapses.

    ``F`` only needs ``value(int)`` and ``act(PMap)``, so both window
    functors and functor expressions qualify.  Returns the kernel group
    and its inclusion into ``F([a_1 + ... + a_k])``.
    """
    from .exactlin import kernel, vstack

    sizes = tuple(sizes)
    s = sum(sizes)
    src = F.value(s)
    maps = [F.act(block_collapse(sizes, r, keep_object)) for r in range(len(sizes))]
    if not maps:
        return src, GroupHom.identity(src)
    tgt = direct_sum([m.target for m in maps])
    stacked = GroupHom(src, tgt, vstack([m.matrix for m in maps], cols=src.ngens))
    return kernel(stacked)
