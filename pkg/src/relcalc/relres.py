"""Projective classes, covers, relative resolutions and their towers.

Class members are tensor products of reduced representables
``h̄_{a_1} ⊗ ... ⊗ h̄_{a_k}`` on a window ``Γ_N``.  Such a member is a
summand of ``h_{[a_1 + ... + a_k]}``, so maps out of it are computed by
Yoneda: ``Hom(P, A)`` is the joint kernel of the block collapses on
``A([a_1 + ... + a_k])`` and the map attached to ``x`` sends the basis
tuple ``(u_1, ..., u_k)`` to ``A([u_1, ..., u_k]) x``.
"""

from __future__ import annotations

import logging
from functools import cached_property
from itertools import product
from typing import NamedTuple, Optional, Sequence

from .exactlin import (
    Complex,
    Echelon,
    FgAbGroup,
    GroupHom,
    IntMatrix,
    Lifter,
    block_diag,
    cokernel,
    hstack,
    direct_sum,
    homology,
    kernel,
    vstack,
)
from .sitecat import (
    CategoryError,
    DiagFunctor,
    GammaWindow,
    NatHom,
    NatTransform,
    PMap,
    block_collapse,
    combine,
    copair_maps,
    cross_effect_of,
    identity_transform,
    pointed_maps,
    representable,
)

log = logging.getLogger(__name__)


class RelresError(ValueError):
    pass


# ---------------------------------------------------------------------------
# classes


class ClassMember:
    """``h̄_{a_1} ⊗ ... ⊗ h̄_{a_k}`` on a Γ window."""

    def __init__(self, category: GammaWindow, sizes: Sequence[int]):
        sizes = tuple(int(a) for a in sizes)
        if not sizes or any(a < 1 for a in sizes):
            raise RelresError(f"member sizes must be positive, got {sizes}")
        if sum(sizes) > category.N:
            raise RelresError(f"member {sizes} needs window {sum(sizes)} > {category.N}")
        self.category = category
        self.sizes = sizes
        self.wedge = sum(sizes)
        F = representable(category, sizes[0], reduced=True)
        for a in sizes[1:]:
            F = combine(F, representable(category, a, reduced=True), "tensor")
        F.name = self.label
        self.functor = F
        self._copairs: dict = {}

    @property
    def label(self) -> str:
        return "⊗".join(f"hbar_{a}" for a in self.sizes)

    def copairs(self, b) -> list:
        """``[u_1, ..., u_k]: [s] -> b`` for each basis tuple of ``P(b)``, in basis order."""
        out = self._copairs.get(b)
        if out is None:
            factors = []
            for a in self.sizes:
                z = (0,) * a
                factors.append([u for u in pointed_maps(a, b) if u.images != z])
            out = [copair_maps(us) for us in product(*factors)]
            self._copairs[b] = out
        return out

    def rank(self, b) -> int:
        return self.functor.value(b).ngens

    def to_json(self) -> dict:
        return {"type": "reduced_tensor", "objects": list(self.sizes)}

    def __repr__(self):
        return f"ClassMember({self.label})"


class ProjectiveClass:
    """A finite set of class members on one Γ window."""

    def __init__(self, category: GammaWindow, members: Sequence, name: str = "P"):
        self.category = category
        seen, out = set(), []
        for m in members:
            if not isinstance(m, ClassMember):
                m = ClassMember(category, m)
            if m.category is not category:
                raise RelresError("class member lives on a different window")
            if m.sizes not in seen:
                seen.add(m.sizes)
                out.append(m)
        self.members = out
        self.name = name

    @property
    def tuples(self) -> list:
        return [m.sizes for m in self.members]

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def is_subclass_of(self, other: "ProjectiveClass") -> bool:
        return set(self.tuples) <= set(other.tuples)

    def to_json(self) -> dict:
        return {"name": self.name, "window": self.category.N, "members": [m.to_json() for m in self.members]}

    @classmethod
    def from_json(cls, category: GammaWindow, obj: dict) -> "ProjectiveClass":
        members = []
        for m in obj["members"]:
            if m.get("type", "reduced_tensor") != "reduced_tensor":
                raise RelresError(f"unsupported member constructor {m.get('type')!r}")
            members.append(tuple(m["objects"]))
        return cls(category, members, obj.get("name", "P"))

    def __repr__(self):
        return f"ProjectiveClass({self.name}: {', '.join(m.label for m in self.members) or 'empty'})"


def smash_class(category: GammaWindow, n: int) -> ProjectiveClass:
    """All ``h̄_{a_1} ⊗ ... ⊗ h̄_{a_k}`` with ``k > n`` and ``a_1 + ... + a_k <= N``."""
    N = category.N
    tuples = []

    def rec(prefix, room):
        if len(prefix) > n:
            tuples.append(tuple(prefix))
        for a in range(1, room + 1):
            rec(prefix + [a], room - a)

    rec([], N)
    tuples.sort(key=lambda t: (sum(t), len(t), t))
    if not tuples:
        log.warning("class of tensors of length > %d on Γ_%d is empty", n, N)
    return ProjectiveClass(category, tuples, f"P_{n}^({N})")


# ---------------------------------------------------------------------------
# functors built from members


class FreeSum(DiagFunctor):
    """Direct sum of class members (repetition allowed)."""

    def __init__(self, category: GammaWindow, members: Sequence[ClassMember], name: str = "X"):
        self.members = list(members)

        def value(b):
            return FgAbGroup.free(sum(m.rank(b) for m in self.members))

        def action(f):
            mats = [m.functor.act(f).matrix for m in self.members]
            return GroupHom(self.value(f.src), self.value(f.tgt), block_diag(mats) if mats else IntMatrix(0, 0))

        super().__init__(category, value, action, name)

    def offsets(self, b) -> list:
        out, off = [], 0
        for m in self.members:
            out.append(off)
            off += m.rank(b)
        return out


class YonedaMap:
    """The map ``⊕_j P_j -> A`` whose ``j``-th component is attached to ``x_j ∈ A([s_j])``."""

    def __init__(self, source: FreeSum, target: DiagFunctor, elements: Sequence[dict]):
        if len(elements) != len(source.members):
            raise RelresError("one element per summand is required")
        self.source = source
        self.target = target
        self.elements = [dict(x) for x in elements]
        self._at: dict = {}

    def at(self, b) -> IntMatrix:
        M = self._at.get(b)
        if M is None:
            cols = []
            for m, x in zip(self.source.members, self.elements):
                for w in m.copairs(b):
                    cols.append(self.target.act(w).matrix.apply(x))
            M = IntMatrix(self.target.value(b).ngens, len(cols), cols)
            self._at[b] = M
        return M

    def hom_at(self, b) -> GroupHom:
        return GroupHom(self.source.value(b), self.target.value(b), self.at(b))

    @cached_property
    def transform(self) -> NatTransform:
        return NatTransform(self.source, self.target, self.at)


def yoneda_transform(member: ClassMember, A: DiagFunctor, x: dict) -> NatTransform:
    """The map ``P -> A`` attached to ``x ∈ cr_k A(a_1, ..., a_k)``."""
    return YonedaMap(FreeSum(member.category, [member], member.label), A, [x]).transform


def block_tuple_element(member: ClassMember, t: NatTransform) -> dict:
    """Inverse of :func:`yoneda_transform`: evaluate at the tuple of block inclusions."""
    s = member.wedge
    incl = []
    off = 0
    for a in member.sizes:
        incl.append(PMap(a, s, tuple(range(off + 1, off + a + 1))))
        off += a
    idx = member.copairs(s).index(copair_maps(incl))
    return dict(t.matrix(s).column(idx))


class MemberHom(NamedTuple):
    """``Hom(P, A) ≅ cr_k A(a_1, ..., a_k)`` with a minimal generating set."""

    member: ClassMember
    functor: DiagFunctor
    group: FgAbGroup
    inclusion: GroupHom
    generators: list

    def transform(self, x: dict) -> NatTransform:
        return yoneda_transform(self.member, self.functor, x)


def member_hom(member: ClassMember, A: DiagFunctor) -> MemberHom:
    K, inc = cross_effect_of(A, member.sizes)
    summands, _ = K.smith_basis
    gens = [inc.matrix.apply(v) for _, v in summands]
    return MemberHom(member, A, K, inc, gens)


# ---------------------------------------------------------------------------
# orthogonality, epimorphisms, covers


class Verdict(NamedTuple):
    ok: bool
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.ok


def perp_membership(A: DiagFunctor, cls: ProjectiveClass) -> Verdict:
    """``Hom(P, A) = 0`` for every member; on failure the witness is ``(P, nonzero map)``."""
    for m in cls:
        mh = member_hom(m, A)
        if not mh.group.is_trivial():
            return Verdict(False, (m, yoneda_transform(m, A, mh.generators[0])))
    return Verdict(True)


def _induced_on_cross_effects(member: ClassMember, t: NatTransform):
    """``Hom(P, t): Hom(P, A') -> Hom(P, A)`` in cross-effect coordinates."""
    K1, inc1 = cross_effect_of(t.source, member.sizes)
    K2, inc2 = cross_effect_of(t.target, member.sizes)
    s = member.wedge
    lifter = Lifter(inc2)
    cols = []
    img = t.matrix(s) @ inc1.matrix
    for c in img.columns():
        z = lifter.lift(c)
        if z is None:
            raise RelresError("transformation does not preserve cross-effects")
        cols.append(z)
    return GroupHom(K1, K2, IntMatrix(K2.ngens, len(cols), cols)), inc2


def is_p_epi(t: NatTransform, cls: ProjectiveClass) -> Verdict:
    """``Hom(P, t)`` surjective for all members; witness ``(P, map that does not lift)``."""
    for m in cls:
        h, inc2 = _induced_on_cross_effects(m, t)
        C, proj = cokernel(h)
        if not C.is_trivial():
            summands, _ = C.smith_basis
            v = summands[0][1]
            x = inc2.matrix.apply(v)
            return Verdict(False, (m, yoneda_transform(m, t.target, x)))
    return Verdict(True)


def spot_check_projective(member: ClassMember, epimorphisms: Sequence[NatTransform]) -> Verdict:
    """Lifting test: every map ``member -> C`` lifts along each pointwise-surjective ``B -> C``.

    Maps that are not pointwise surjective are skipped.  The witness is
    ``(epimorphism, map that fails to lift)``.
    """
    single = ProjectiveClass(member.category, [member], member.label)
    for t in epimorphisms:
        if not t.is_epi():
            continue
        v = is_p_epi(t, single)
        if not v.ok:
            return Verdict(False, (t, v.witness[1]))
    return Verdict(True)


class PhiCover(NamedTuple):
    base: DiagFunctor
    cover: FreeSum
    counit: YonedaMap
    index: list  # (member, element of base([s])) per summand

    @property
    def epsilon(self) -> NatTransform:
        return self.counit.transform

    def inclusion(self, j: int) -> NatTransform:
        """``in_j: P_j -> Φ(A)`` for summand ``j``."""
        cover = self.cover
        m = cover.members[j]

        def comp(b):
            off = cover.offsets(b)[j]
            r = m.rank(b)
            return IntMatrix(cover.value(b).ngens, r, ({off + i: 1} for i in range(r)))

        src = FreeSum(cover.category, [m], m.label)
        return NatTransform(src, cover, comp)


def _cover_from_elements(category, A, pairs, name) -> PhiCover:
    X = FreeSum(category, [m for m, _ in pairs], name)
    eps = YonedaMap(X, A, [x for _, x in pairs])
    return PhiCover(A, X, eps, list(pairs))


def _cover_pairs(Y: DiagFunctor, homs, cls: ProjectiveClass) -> list:
    """Generators ``(member, y)`` making ``⊕ P -> Y`` surjective on every ``Hom(P, -)``.

    ``homs(P)`` gives ``(H, inc)`` with ``H ≅ Hom(P, K)`` for the subfunctor
    ``K ⊆ Y`` being covered.  Members are handled in class order and only
    the part of ``H`` not already reached through earlier summands gets new
    generators, so the cover stays small.
    """
    pairs: list = []
    cr_cache: dict = {}
    for P in cls:
        H, inc = homs(P)
        if H.is_trivial():
            continue
        s = P.wedge
        cols = []
        if pairs:
            blocks = []
            for Q, _ in pairs:
                key = (Q.sizes, P.sizes)
                if key not in cr_cache:
                    cr_cache[key] = cross_effect_of(Q.functor, P.sizes)[1].matrix
                blocks.append(cr_cache[key])
            X = FreeSum(cls.category, [Q for Q, _ in pairs])
            img = YonedaMap(X, Y, [y for _, y in pairs]).at(s) @ block_diag(blocks)
            lifter = Lifter(inc)
            for c in img.columns():
                z = lifter.lift(c)
                if z is None:
                    raise RelresError("cover image leaves the subfunctor")
                cols.append(z)
        C = FgAbGroup(H.ngens, hstack([H.relations, IntMatrix(H.ngens, len(cols), cols)], rows=H.ngens))
        for v in C.generating_set:
            pairs.append((P, inc.matrix.apply(v)))
    return pairs


def phi_cover(A: DiagFunctor, cls: ProjectiveClass, name: str = "Phi") -> PhiCover:
    """One summand per generator of each ``Hom(P, A)``, skipping maps that factor through earlier summands."""
    pairs = _cover_pairs(A, lambda P: cross_effect_of(A, P.sizes), cls)
    return _cover_from_elements(cls.category, A, pairs, name)


def quotient_functor(A: DiagFunctor, maps: Sequence, name: str) -> DiagFunctor:
    """``A`` modulo the images of ``maps`` (objects with ``at(b)``), same generators as ``A``."""

    def value(b):
        G = A.value(b)
        return FgAbGroup(G.ngens, hstack([G.relations] + [mp.at(b) for mp in maps], rows=G.ngens))

    def action(f):
        return GroupHom(Q.value(f.src), Q.value(f.tgt), A.act(f).matrix)

    Q = DiagFunctor(A.category, value, action, name)
    return Q


def degree_zero_approx(A: DiagFunctor, cls: ProjectiveClass):
    """``(i*A, unit)`` with ``i*A = coker(ε_A)``; the unit is the identity on generators."""
    cov = phi_cover(A, cls)
    Q = quotient_functor(A, [cov.counit], f"i*({A.name})")
    unit = NatTransform(A, Q, lambda b: IntMatrix.identity(A.value(b).ngens))
    return Q, unit


class AdjointVerdict(NamedTuple):
    bijective: bool
    hom_quotient: tuple
    hom_original: tuple


def adjoint_transport(A: DiagFunctor, B: DiagFunctor, cls: ProjectiveClass) -> AdjointVerdict:
    """Is precomposition with the unit a bijection ``Hom(i*A, B) -> Hom(A, B)``?"""
    if not perp_membership(B, cls):
        raise RelresError("target is not orthogonal to the class")
    Q, unit = degree_zero_approx(A, cls)
    HQ, HA = NatHom(Q, B), NatHom(A, B)
    cols = []
    for t in HQ.basis:
        # i*A has the generators of A and the unit is the identity on them
        cols.append(HA.coords(NatTransform(A, B, t.matrix)))
    f = GroupHom(HQ.group, HA.group, IntMatrix(HA.group.ngens, len(cols), cols))
    return AdjointVerdict(f.is_isomorphism(), HQ.group.canonical_form, HA.group.canonical_form)


# ---------------------------------------------------------------------------
# resolutions


class RelResolution:
    """``X_{depth-1} -> ... -> X_0 -> X_{-1} = A`` with ``X_i`` sums of class members.

    ``maps[i]`` is ``d_i: X_i -> X_{i-1}`` (``d_0`` the cover counit).
    """

    def __init__(self, base: DiagFunctor, cls: ProjectiveClass, terms, maps, depth: int):
        self.base = base
        self.cls = cls
        self.terms = terms
        self.maps = maps
        self.depth = depth

    def term(self, i: int) -> DiagFunctor:
        return self.base if i == -1 else self.terms[i]

    def complex_at(self, b) -> Complex:
        """The augmented complex at ``b`` with ``A(b)`` in degree 0 and ``X_i(b)`` in degree ``i+1``."""
        groups = [self.base.value(b)] + [X.value(b) for X in self.terms]
        diffs = [GroupHom(groups[k + 1], groups[k], self.maps[k].at(b)) for k in range(len(self.terms))]
        return Complex(0, groups, diffs)

    def certificate(self) -> list:
        """Homology of ``Hom(P, X_*)`` in resolution degrees ``-1 .. depth-2``, per member.

        Each entry is ``(member label, degree, canonical form)``; all must be trivial.
        """
        out = []
        for m in self.cls:
            s = m.wedge
            crs = [cross_effect_of(self.term(i), m.sizes) for i in range(-1, len(self.terms))]
            groups = [K for K, _ in crs]
            diffs = []
            for k in range(len(self.terms)):
                Kk, inck = crs[k + 1]
                img = self.maps[k].at(s) @ inck.matrix
                lifter = Lifter(crs[k][1])
                cols = []
                for c in img.columns():
                    z = lifter.lift(c)
                    if z is None:
                        raise RelresError("differential does not preserve cross-effects")
                    cols.append(z)
                diffs.append(GroupHom(Kk, groups[k], IntMatrix(groups[k].ngens, len(cols), cols)))
            C = Complex(0, groups, diffs)
            for deg in range(-1, self.depth - 1):
                out.append((m.label, deg, homology(C, deg + 1).canonical_form))
        return out

    def is_certified(self) -> bool:
        return all(cf == (0, ()) for _, _, cf in self.certificate())


def _cross_kernel(X: DiagFunctor, d, target: DiagFunctor, sizes):
    """``Hom(P, ker d) = {v ∈ X([s]) : d v = 0, collapses kill v}``."""
    s = sum(sizes)
    src = X.value(s)
    mats = [d.at(s)]
    tgts = [target.value(s)]
    for r in range(len(sizes)):
        h = X.act(block_collapse(sizes, r, keep_object=False))
        mats.append(h.matrix)
        tgts.append(h.target)
    return kernel(GroupHom(src, direct_sum(tgts), vstack(mats, cols=src.ngens)))


def p_resolution(A: DiagFunctor, cls: ProjectiveClass, depth: int) -> RelResolution:
    """Relative resolution with terms ``X_0 .. X_{depth-1}``; ``X_{i+1}`` covers ``ker d_i``."""
    if depth < 1:
        raise RelresError("depth must be at least 1")
    cov = phi_cover(A, cls, "X_0")
    terms, maps = [cov.cover], [cov.counit]
    for i in range(1, depth):
        X, d = terms[-1], maps[-1]
        prev = A if i == 1 else terms[-2]
        pairs = _cover_pairs(X, lambda P: _cross_kernel(X, d, prev, P.sizes), cls)
        log.debug("X_%d: %d summands", i, len(pairs))
        Xi = FreeSum(cls.category, [m for m, _ in pairs], f"X_{i}")
        terms.append(Xi)
        maps.append(YonedaMap(Xi, X, [x for _, x in pairs]))
    return RelResolution(A, cls, terms, maps, depth)


class ApproxComplex:
    """Augmented resolution reindexed with ``A`` in degree 0; homology trusted below ``depth``."""

    def __init__(self, resolution: RelResolution):
        self.resolution = resolution
        self.depth = resolution.depth
        self._hf: dict = {}

    @property
    def base(self):
        return self.resolution.base

    def complex_at(self, b) -> Complex:
        return self.resolution.complex_at(b)

    def homology(self, degree: int, b) -> FgAbGroup:
        if not 0 <= degree < self.depth:
            raise RelresError(f"degree {degree} outside the valid range 0..{self.depth - 1}")
        return homology(self.complex_at(b), degree)

    def homology_table(self, objects=None) -> dict:
        objects = self.base.category.objects if objects is None else objects
        return {(d, b): self.homology(d, b).canonical_form for d in range(self.depth) for b in objects}

    def homology_functor(self, degree: int) -> DiagFunctor:
        """``H_degree`` as a functor on the window (actions induced on cycles)."""
        if degree in self._hf:
            return self._hf[degree]
        if not 0 <= degree < self.depth:
            raise RelresError(f"degree {degree} outside the valid range 0..{self.depth - 1}")
        res = self.resolution
        if degree == 0:
            F = quotient_functor(res.base, [res.maps[0]], f"H_0({res.base.name})")
            self._hf[0] = F
            return F
        X = res.term(degree - 1)
        cyc: dict = {}

        def cycles(b):
            if b not in cyc:
                out = res.maps[degree - 1].hom_at(b)
                K, inc = kernel(out)
                cyc[b] = (K, inc, Lifter(inc))
            return cyc[b]

        def value(b):
            K, inc, lifter = cycles(b)
            img = res.maps[degree].at(b) if degree < len(res.terms) else IntMatrix(X.value(b).ngens, 0)
            cols = list(K.relations.columns())
            for c in img.columns():
                z = lifter.lift(c)
                if z is None:
                    raise RelresError("d ∘ d != 0 in resolution")
                cols.append(z)
            return FgAbGroup(K.ngens, IntMatrix(K.ngens, len(cols), cols))

        def action(f):
            K1, inc1, _ = cycles(f.src)
            K2, _, lifter2 = cycles(f.tgt)
            img = X.act(f).matrix @ inc1.matrix
            cols = [lifter2.lift(c) for c in img.columns()]
            return GroupHom(H.value(f.src), H.value(f.tgt), IntMatrix(K2.ngens, len(cols), cols))

        H = DiagFunctor(res.base.category, value, action, f"H_{degree}")
        self._hf[degree] = H
        return H

    def report(self, objects=None) -> dict:
        objects = self.base.category.objects if objects is None else objects
        table = {}
        for d in range(self.depth):
            table[f"H{d}"] = {f"[{b}]": self.homology(d, b).canonical_json() for b in objects}
        return {"valid_degrees": [0, self.depth - 1], "homology": table}


def approx_complex(A: DiagFunctor, cls: ProjectiveClass, depth: int) -> ApproxComplex:
    return ApproxComplex(p_resolution(A, cls, depth))


# ---------------------------------------------------------------------------
# comparison maps and towers


class ChainLift:
    """Chain map ``fine -> coarse`` over ``id_A``; ``maps[i]: X^f_i -> X^c_i``."""

    def __init__(self, fine: RelResolution, coarse: RelResolution, maps):
        self.fine, self.coarse, self.maps = fine, coarse, maps

    def at(self, i: int, b) -> IntMatrix:
        if i == -1:
            return IntMatrix.identity(self.fine.base.value(b).ngens)
        return self.maps[i].at(b)

    def commutes(self, b) -> bool:
        """``d^c_i φ_i = φ_{i-1} d^f_i`` at ``b`` for every stored degree (``i = 0`` is the augmentation)."""
        A = self.fine.base
        for i in range(len(self.maps)):
            lhs = self.coarse.maps[i].at(b) @ self.maps[i].at(b)
            rhs = self.at(i - 1, b) @ self.fine.maps[i].at(b)
            tgt = A.value(b) if i == 0 else self.coarse.term(i - 1).value(b)
            diff = lhs - rhs
            if not all(tgt.is_zero_element(c) for c in diff.columns()):
                return False
        return True

    def on_homology(self, degree: int, b) -> GroupHom:
        """Induced map ``H_degree(fine)(b) -> H_degree(coarse)(b)`` (approx indexing)."""
        Cf, Cc = self.fine.complex_at(b), self.coarse.complex_at(b)
        chain = self.at(degree - 1, b)
        Hf, Hc = homology(Cf, degree), homology(Cc, degree)
        if degree == 0:
            return GroupHom(Hf, Hc, chain)
        Kf, incf = kernel(Cf.d(degree))
        Kc, incc = kernel(Cc.d(degree))
        lifter = Lifter(incc)
        cols = [lifter.lift(c) for c in (chain @ incf.matrix).columns()]
        return GroupHom(Hf, Hc, IntMatrix(Kc.ngens, len(cols), cols))


def comparison_lift(fine: RelResolution, coarse: RelResolution) -> ChainLift:
    """Lift ``id_A`` to a chain map by solving the lifting systems degree by degree."""
    if fine.base is not coarse.base:
        raise RelresError("resolutions of different objects")
    if not fine.cls.is_subclass_of(coarse.cls):
        raise RelresError("fine class is not contained in the coarse class")
    depth = min(len(fine.terms), len(coarse.terms))
    A = fine.base
    maps = []
    for i in range(depth):
        Xf, Xc = fine.terms[i], coarse.terms[i]
        dc = coarse.maps[i]
        prev_target = A if i == 0 else coarse.terms[i - 1]
        solvers: dict = {}
        elements = []
        for m, x in zip(Xf.members, fine.maps[i].elements):
            s = m.wedge
            w = x if i == 0 else maps[i - 1].at(s).apply(x)
            if m.sizes not in solvers:
                src = Xc.value(s)
                tgt = prev_target.value(s)
                blocks = [dc.at(s)]
                for r in range(len(m.sizes)):
                    blocks.append(Xc.act(block_collapse(m.sizes, r, keep_object=False)).matrix)
                stacked = vstack(blocks, cols=src.ngens)
                rels = tgt.relations
                pad = IntMatrix(stacked.rows, rels.cols,
                                [dict(c) for c in rels.columns()])
                solvers[m.sizes] = (Echelon(IntMatrix(stacked.rows, src.ngens + rels.cols,
                                                      list(stacked.columns()) + list(pad.columns()))),
                                    src.ngens)
            solver, n = solvers[m.sizes]
            sol = solver.solve(w)
            if sol is None:
                raise RelresError(
                    f"lifting system unsolvable in degree {i} for {m.label}: the class nesting "
                    "or the coarse resolution is broken"
                )
            elements.append({j: v for j, v in sol.items() if j < n})
        maps.append(YonedaMap(Xf, Xc, elements))
    return ChainLift(fine, coarse, maps)


class ApproxTower:
    """Quotient tower ``i*_n A`` and derived tower of approximation complexes."""

    def __init__(self, base, classes, quotients, approximations, lifts):
        self.base = base
        self.classes = classes
        self.quotients = quotients
        self.approximations = approximations
        self.lifts = lifts

    def quotient_map(self, level: int) -> NatTransform:
        """``i*_{level+1} A -> i*_{level} A`` (0-based levels; identity on generators)."""
        src, tgt = self.quotients[level + 1], self.quotients[level]
        return NatTransform(src, tgt, lambda b: IntMatrix.identity(self.base.value(b).ngens))

    def report(self, objects=None) -> dict:
        objects = self.base.category.objects if objects is None else objects
        levels = {}
        for k, (cls, ax) in enumerate(zip(self.classes, self.approximations)):
            levels[cls.name] = {
                "quotient": {f"[{b}]": self.quotients[k].value(b).canonical_json() for b in objects},
                **ax.report(objects),
            }
        return {"levels": levels}


def tower(A: DiagFunctor, classes: Sequence[ProjectiveClass], depth: int) -> ApproxTower:
    """Classes are listed coarse to fine (``P_1 ⊇ P_2 ⊇ ...``)."""
    classes = list(classes)
    for coarse, fine in zip(classes, classes[1:]):
        if not fine.is_subclass_of(coarse):
            raise RelresError(f"{fine.name} is not contained in {coarse.name}")
    approxs = [approx_complex(A, c, depth) for c in classes]
    quotients = [a.homology_functor(0) for a in approxs]
    lifts = [
        comparison_lift(approxs[k + 1].resolution, approxs[k].resolution)
        for k in range(len(classes) - 1)
    ]
    return ApproxTower(A, classes, quotients, approxs, lifts)


def engine_invariants(A: DiagFunctor, cls: ProjectiveClass, depth: int, targets: Sequence[DiagFunctor] = ()) -> dict:
    """Check the structural invariants of the engine for one ``(A, class)`` pair.

    ``targets`` are extra functors in the orthogonal subcategory used for the
    adjunction check; ``i*A`` itself is always included.
    """
    out = {}
    cov = phi_cover(A, cls)
    out["cover_is_p_epi"] = is_p_epi(cov.epsilon, cls).ok
    out["cover_factors"] = all(
        (cov.epsilon @ cov.inclusion(j)).matrix(m.wedge) == yoneda_transform(m, A, x).matrix(m.wedge)
        for j, (m, x) in enumerate(cov.index)
    )
    Q, unit = degree_zero_approx(A, cls)
    out["quotient_in_perp"] = perp_membership(Q, cls).ok
    ax = approx_complex(A, cls, depth)
    objs = A.category.objects
    out["h0_is_quotient"] = all(
        ax.homology(0, b).canonical_form == Q.value(b).canonical_form for b in objs
    )
    out["homology_in_perp"] = all(perp_membership(ax.homology_functor(i), cls).ok for i in range(depth))
    out["certificate"] = ax.resolution.is_certified()
    out["adjunction"] = all(adjoint_transport(A, B, cls).bijective for B in [Q, *targets])
    return out
