import pytest

from relcalc.calculus import (
    WindowError,
    bar_complex,
    compare_towers,
    connecting_map,
    cross_effect,
    degree_at_most,
    eval_expr,
    finite_class,
    layer_homology,
    parse_expr,
    perp_equals_degree,
    pn_homology,
    required_window,
    splitting_check,
    tabulate,
)
from relcalc.exactlin import cokernel, kernel
from relcalc.sitecat import PMap

LIN = parse_expr("lin")
SQ = parse_expr("pow(lin,2)")
SYM2 = parse_expr("sym2(lin)")


def free(r):
    return (r, ())


# ---- evaluation ----------------------------------------------------------

def test_eval_values():
    assert eval_expr(LIN, 3, 3).canonical_form == free(3)
    assert eval_expr(parse_expr("tensor(lin,lin)"), 3, 3).canonical_form == free(9)
    assert eval_expr(SYM2, 1, 1).canonical_form == free(1)
    assert eval_expr(parse_expr("ext2(lin)"), 1, 1).is_trivial()
    assert eval_expr(parse_expr("coef(lin,Z/2)"), 2, 2).canonical_form == (0, (2, 2))


def test_eval_morphism_is_functorial():
    f = PMap(2, 1, (1, 1))
    g = PMap(1, 2, (2,))
    for T in (SQ, SYM2):
        assert (T.act(f) @ T.act(g)).equals(T.act(PMap(1, 1, (1,))))


def test_eval_window_error():
    with pytest.raises(WindowError) as exc:
        eval_expr(LIN, 4, 3)
    assert exc.value.required == 4
    assert exc.value.to_json()["required_window"] == 4


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_expr("pow(lin")
    with pytest.raises(ValueError):
        parse_expr("frob(lin)")


def test_tabulated_functor_validates():
    F = tabulate(SYM2, 2)
    assert F.validate().ok


# ---- cross-effects and degree --------------------------------------------

@pytest.mark.parametrize(
    "text,sizes,expected",
    [
        ("lin", (1, 1), free(0)),
        ("pow(lin,2)", (1, 1), free(2)),
        ("pow(lin,2)", (1, 1, 1), free(0)),
        ("sym2(lin)", (1, 1), free(1)),
        ("const(Z/2)", (1,), free(0)),
    ],
)
def test_cross_effect_examples(text, sizes, expected):
    assert cross_effect(parse_expr(text), sizes).group.canonical_form == expected


def test_splitting():
    ok, whole, total = splitting_check(SQ, (1, 2))
    assert ok and whole == total


def test_degree_verdicts():
    assert degree_at_most(LIN, 1, 3).ok
    v = degree_at_most(SQ, 1, 3)
    assert not v.ok and v.witness == (1, 1)
    v = degree_at_most(SQ, 2, 3)
    assert v.ok and (1, 1, 1) in v.checked


def test_finite_class(caplog):
    assert finite_class(1, 2).tuples == [(1, 1)]
    assert finite_class(1, 3).tuples == [(1, 1), (1, 2), (2, 1), (1, 1, 1)]
    assert finite_class(2, 2).tuples == []
    assert "empty" in caplog.text


def test_perp_equals_degree():
    v = perp_equals_degree(LIN, 1, 3)
    assert v.agree and v.perp and v.degree
    assert all(h == c == free(0) for _, h, c in v.rows)
    v = perp_equals_degree(SQ, 1, 2)
    assert v.agree and not v.perp and not v.degree
    assert v.rows[0][1] == v.rows[0][2] == free(2)
    v = perp_equals_degree(parse_expr("const(Z/2)"), 0, 2)
    assert v.agree and v.perp


# ---- bar construction ----------------------------------------------------

def test_bar_complex_low_degree_functor():
    B = bar_complex(LIN, 1, 2, 3)
    assert B.complex.is_complex()
    assert all(B.complex.group(j).is_trivial() for j in range(1, B.top + 1))


def test_bar_complex_square():
    B = bar_complex(SQ, 1, 1, 2)
    assert B.complex.is_complex()
    assert B.complex.group(1).canonical_form == free(2)


def test_required_window_checked():
    assert required_window(1, 1, 2) == 4
    with pytest.raises(WindowError) as exc:
        bar_complex(SQ, 1, 1, 2, window=3)
    assert exc.value.required == 4


def test_pn_homology_examples():
    for x in (1, 2):
        t = pn_homology(SQ, 2, x, 2)
        assert t.forms() == [free(x * x), free(0)]
    assert pn_homology(SQ, 1, 1, 3).forms() == [free(0)] * 3
    t = pn_homology(parse_expr("const(Z/3)"), 1, 1, 2)
    assert t.forms() == [(0, (3,)), free(0)]


def test_pn_homology_sym2_has_torsion():
    t = pn_homology(SYM2, 1, 1, 3)
    assert t.forms()[2] == (0, (2,))


# ---- layers and connecting maps ------------------------------------------

def test_layer_of_low_degree_functor_vanishes():
    assert layer_homology(LIN, 2, 1, 2).forms() == [free(0)] * 2


def test_layer_square_top():
    assert layer_homology(SQ, 2, 1, 2).forms() == pn_homology(SQ, 2, 1, 2).forms()


def test_layer_lin():
    for x in (1, 2):
        assert layer_homology(LIN, 1, x, 2).forms()[0] == free(x)


def test_layer_sym2():
    assert layer_homology(SYM2, 2, 1, 2).forms() == [free(1), (0, (2,))]


def test_connecting_map():
    m = connecting_map(SQ, 2, 1, 2)
    assert m.commutes() and m.augmentation_compatible()
    m = connecting_map(LIN, 2, 1, 2)
    assert m.commutes() and m.augmentation_compatible()
    h = m.on_homology(0)
    assert kernel(h)[0].is_trivial() and cokernel(h)[0].is_trivial()


# ---- comparison ----------------------------------------------------------

def test_compare_towers_examples():
    c = compare_towers(LIN, 1, 3, 2, 1)
    assert c.all_agree and c.relative[0] == free(1)
    c = compare_towers(SQ, 1, 3, 2, 1)
    assert c.all_agree and c.relative[0] == free(0)
    c = compare_towers(SQ, 2, 3, 2, 1)
    assert c.all_agree and c.relative == [free(1), free(0)]
    assert c.to_json()["h0_agreement"] == "exact"


def test_compare_towers_torsion():
    c = compare_towers(SYM2, 1, 3, 3, 1)
    assert c.all_agree
    assert c.cotriple[2] == (0, (2,))


def test_compare_towers_point_outside_window():
    with pytest.raises(WindowError):
        compare_towers(LIN, 1, 2, 2, 3)


def test_tabulated_round_trip(tmp_path):
    import json

    path = tmp_path / "sym2.json"
    path.write_text(json.dumps(tabulate(SYM2, 2).to_json()))
    T = parse_expr(f"tab({path})")
    assert eval_expr(T, 2, 2).canonical_form == free(3)
    assert cross_effect(T, (1, 1)).group.canonical_form == free(1)
    with pytest.raises(WindowError):
        eval_expr(T, 3)
