from math import prod

from hypothesis import given, settings
from hypothesis import strategies as st

from relcalc.acceptance import determinantal_divisors
from relcalc.exactlin import (
    Complex,
    Echelon,
    FgAbGroup,
    GroupHom,
    IntMatrix,
    canonical_form,
    cokernel,
    cone,
    hom_group,
    homology,
    invariant_factors,
    kernel,
    smith,
    solve_presentation,
    tensor_group,
    tensor_hom,
)
from relcalc.exactlin.groups import prune_presentation

G = FgAbGroup.parse


def mat(rows):
    return IntMatrix.from_rows(rows)


# ---- smith ---------------------------------------------------------------

def test_smith_two_by_two():
    A = mat([[2, 4], [6, 8]])
    f = smith(A)
    assert list(f.diagonal) == [2, 4]
    assert f.U @ A @ f.V == f.S


def test_smith_identity():
    f = smith(IntMatrix.identity(2))
    assert list(f.diagonal) == [1, 1]


def test_smith_row_vector():
    f = smith(mat([[4, 6]]))
    assert list(f.diagonal) == [2]
    assert f.S.to_rows() == [[2, 0]]


def test_smith_zero_matrix():
    f = smith(IntMatrix(3, 2))
    assert f.rank == 0
    assert f.S.is_zero()


matrices = st.integers(1, 5).flatmap(
    lambda m: st.integers(1, 5).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_smith_properties(rows):
    A = mat(rows)
    f = smith(A)
    assert f.U @ A @ f.V == f.S
    assert f.U @ f.U_inv == IntMatrix.identity(A.rows)
    assert f.V @ f.V_inv == IntMatrix.identity(A.cols)
    nz = [d for d in f.diagonal if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    dd = determinantal_divisors(rows)
    diag = list(f.diagonal)
    for k in range(1, len(dd) + 1):
        assert prod(diag[:k]) == dd[k - 1]


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_invariant_factors_agree_with_smith(rows):
    A = mat(rows)
    rank, factors = invariant_factors(A)
    nz = [d for d in smith(A).diagonal if d]
    assert rank == len(nz)
    assert factors == [d for d in nz if d > 1]


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_echelon_kernel_and_solve(rows):
    A = mat(rows)
    E = Echelon(A)
    for v in E.kernel_vectors():
        assert not A.apply(v)
    assert E.rank + len(E.kernel_vectors()) == A.cols
    b = A.apply({0: 3, A.cols - 1: -2})
    x = E.solve(b)
    assert x is not None and A.apply(x) == b


def test_echelon_unsolvable():
    assert Echelon(mat([[2]])).solve({0: 3}) is None


# ---- groups --------------------------------------------------------------

def test_canonical_forms():
    assert canonical_form(FgAbGroup(2, IntMatrix.diagonal([2, 3]))) == (0, (6,))
    assert canonical_form(FgAbGroup.free(3)) == (3, ())
    assert FgAbGroup(1, mat([[1]])).is_trivial()


def test_parse_and_describe():
    assert G("Z^2+Z/4").canonical_form == (2, (4,))
    assert G("Z/2+Z/3").describe() == "Z/6"
    assert G("0").is_trivial()


def test_kernel_examples():
    Z = FgAbGroup.free(1)
    K, _ = kernel(GroupHom(Z, Z, mat([[2]])))
    assert K.is_trivial()
    K, inc = kernel(GroupHom(FgAbGroup.free(2), Z, mat([[1, 0]])))
    assert K.canonical_form == (1, ())
    assert inc.matrix.to_rows() in ([[0], [1]], [[0], [-1]])
    K, inc = kernel(GroupHom(Z, FgAbGroup.cyclic(2), mat([[1]])))
    assert K.canonical_form == (1, ())
    assert abs(inc.matrix.entry(0, 0)) == 2


def test_cokernel_examples():
    Z = FgAbGroup.free(1)
    assert cokernel(GroupHom(Z, Z, mat([[2]])))[0].canonical_form == (0, (2,))
    H = G("Z+Z/3")
    C, _ = cokernel(GroupHom(FgAbGroup.trivial(), H, IntMatrix(H.ngens, 0)))
    assert C.canonical_form == H.canonical_form
    Z2 = FgAbGroup.free(2)
    assert cokernel(GroupHom(Z2, Z2, mat([[2, 4], [6, 8]])))[0].canonical_form == (0, (2, 4))


def test_hom_group_examples():
    grp, basis = hom_group(G("Z/4"), G("Z/6"))
    assert grp.canonical_form == (0, (2,))
    assert basis[0].matrix.to_rows() == [[3]]
    H = G("Z^2+Z/5")
    assert hom_group(G("Z"), H)[0].canonical_form == H.canonical_form
    assert hom_group(G("Z/2"), G("Z"))[0].is_trivial()


def test_tensor_examples():
    assert tensor_group(G("Z/4"), G("Z/6")).canonical_form == (0, (2,))
    H = G("Z+Z/6")
    assert tensor_group(G("Z"), H).canonical_form == H.canonical_form
    assert tensor_group(G("Z+Z/2"), G("Z/4")).canonical_form == (0, (2, 4))


def test_tensor_hom_is_well_defined():
    f = GroupHom(G("Z/4"), G("Z/2"), mat([[1]]))
    g = GroupHom(G("Z/6"), G("Z/3"), mat([[1]]))
    h = tensor_hom(f, g)
    assert h.is_well_defined()


def test_solve_presentation():
    assert solve_presentation(mat([[2]]), [4]) == [2]
    assert solve_presentation(mat([[2]]), [3]) is None
    x = solve_presentation(mat([[2, 3]]), [1])
    assert 2 * x[0] + 3 * x[1] == 1


def test_malformed_relations_rejected():
    import pytest

    with pytest.raises(ValueError):
        FgAbGroup(2, IntMatrix(3, 1))
    with pytest.raises(ValueError):
        FgAbGroup.parse("Q")


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_prune_is_isomorphism(rows):
    A = mat(rows)
    H = FgAbGroup(A.rows, A)
    P, pi, sigma = prune_presentation(H)
    assert P.canonical_form == H.canonical_form
    there, back = GroupHom(H, P, pi), GroupHom(P, H, sigma)
    assert there.is_well_defined() and back.is_well_defined()
    assert (back @ there).equals(GroupHom.identity(H))


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_smith_basis_coordinates(rows):
    A = mat(rows)
    H = FgAbGroup(A.rows, A)
    summands, coord = H.smith_basis
    assert sorted(d for d, _ in summands if d) == list(H.canonical_form[1])
    assert sum(1 for d, _ in summands if d == 0) == H.canonical_form[0]
    for i, (d, v) in enumerate(summands):
        c = coord.apply(v)
        for j, (e, _) in enumerate(summands):
            want = 1 if i == j else 0
            got = c.get(j, 0)
            assert (got - want) % e == 0 if e else got == want


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_kernel_cokernel_rank_nullity(rows):
    A = mat(rows)
    f = GroupHom(FgAbGroup.free(A.cols), FgAbGroup.free(A.rows), A)
    K, inc = kernel(f)
    C, _ = cokernel(f)
    rank, _ = invariant_factors(A)
    assert K.canonical_form[0] == A.cols - rank
    assert C.canonical_form[0] == A.rows - rank
    assert (f @ inc).is_zero()


# ---- complexes -----------------------------------------------------------

def test_homology_examples():
    Z = FgAbGroup.free(1)
    C = Complex(0, [Z, Z], [GroupHom(Z, Z, mat([[2]]))])
    assert homology(C, 0).canonical_form == (0, (2,))
    assert homology(C, 1).is_trivial()
    C = Complex(0, [Z, Z], [GroupHom(Z, Z, mat([[1]]))])
    assert all(homology(C, i).is_trivial() for i in range(-1, 3))
    Z2 = FgAbGroup.free(2)
    d2 = GroupHom(Z, Z2, mat([[2], [3]]))
    d1 = GroupHom(Z2, Z, mat([[3, -2]]))
    C = Complex(0, [Z, Z2, Z], [d1, d2])
    assert C.is_complex()
    assert homology(C, 1).is_trivial()
    assert homology(C, 0).is_trivial()


def test_cone_of_identity_is_acyclic():
    Z = FgAbGroup.free(1)
    A = Complex(0, [Z, Z], [GroupHom(Z, Z, mat([[2]]))])
    ident = [GroupHom.identity(g) for g in A.groups]
    Cn = cone(ident, A, A)
    assert Cn.is_complex()
    assert all(homology(Cn, k).is_trivial() for k in range(Cn.low, Cn.high + 1))


def test_complex_json_round_trip():
    Z = FgAbGroup.free(1)
    C = Complex(0, [Z, FgAbGroup.cyclic(4)], [GroupHom(FgAbGroup.cyclic(4), Z, IntMatrix(1, 1))])
    D = Complex.from_json(C.to_json())
    assert [g.canonical_form for g in D.groups] == [g.canonical_form for g in C.groups]
