"""Functor calculus on finite pointed sets: cross-effects, degree, ``P_n`` and layers."""

from .compare import TowerComparison, TowerReport, calculus_tower, compare_towers
from .cotriple import (
    BarComplex,
    ChainMap,
    HomologyTable,
    bar_complex,
    connecting_map,
    layer_homology,
    pn_homology,
    required_window,
)
from .crosseffects import (
    CrossEffectResult,
    DegreeVerdict,
    PerpDegreeVerdict,
    cross_effect,
    degree_at_most,
    finite_class,
    perp_equals_degree,
    splitting_check,
    window_tuples,
)
from .expr import (
    Coef,
    Const,
    Ext2,
    FunctorExpr,
    Lin,
    Pow,
    RedRep,
    Sum,
    Sym2,
    Tab,
    Tensor,
    TensorPower,
    WindowError,
    eval_expr,
    load_tabulated,
    parse_expr,
    tabulate,
)

FIXTURES = [
    "const(Z)",
    "const(Z/2)",
    "lin",
    "pow(lin,2)",
    "pow(lin,3)",
    "sym2(lin)",
    "ext2(lin)",
    "coef(lin,Z/2)",
]
