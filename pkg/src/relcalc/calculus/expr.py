"""Functor expressions: test functors from finite pointed sets to abelian groups.

An expression is evaluated at ``[m]`` for any ``m`` unless it wraps a
tabulated window functor, in which case ``m`` must stay inside that
window.
"""

from __future__ import annotations

import json
import re
from typing import Optional

from ..exactlin import (
    FgAbGroup,
    GroupHom,
    IntMatrix,
    direct_sum,
    direct_sum_hom,
    tensor_group,
    tensor_hom,
)
from ..sitecat import DiagFunctor, PMap, gamma_window, pmap_compose, pointed_maps


class WindowError(ValueError):
    """Evaluation outside a window; ``required`` is the smallest window that would do."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required

    def to_json(self) -> dict:
        return {"error": "window_overflow", "message": str(self), "required_window": self.required}


class FunctorExpr:
    """Base class; subclasses implement ``_value`` and ``_act``."""

    def __init__(self):
        self._values: dict = {}
        self._actions: dict = {}

    def value(self, m: int) -> FgAbGroup:
        v = self._values.get(m)
        if v is None:
            if m < 0:
                raise ValueError(f"no object [{m}]")
            v = self._value(m)
            self._values[m] = v
        return v

    def act(self, f: PMap) -> GroupHom:
        h = self._actions.get(f)
        if h is None:
            h = self._act(f)
            self._actions[f] = h
        return h

    __call__ = value

    @property
    def window(self) -> Optional[int]:
        """Largest evaluable object, ``None`` for unbounded."""
        ws = [c.window for c in self.children() if c.window is not None]
        return min(ws) if ws else None

    def children(self) -> list:
        return []

    def degree(self) -> Optional[int]:
        """Symbolic polynomial degree (``None`` when unknown)."""
        return None

    def check_window(self, m: int):
        w = self.window
        if w is not None and m > w:
            raise WindowError(f"{self} is tabulated up to [{w}], [{m}] requested", m)

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"FunctorExpr({self.text()})"

    def text(self) -> str:
        raise NotImplementedError


class Const(FunctorExpr):
    def __init__(self, G: FgAbGroup, label: str | None = None):
        super().__init__()
        self.G = G
        self.label = label or G.describe().replace(" ", "")

    def _value(self, m):
        return self.G

    def _act(self, f):
        return GroupHom.identity(self.G)

    def degree(self):
        return 0

    def text(self):
        return f"const({self.label})"


class Lin(FunctorExpr):
    """Reduced chains: ``[m] ↦ Z^m``."""

    def _value(self, m):
        return FgAbGroup.free(m)

    def _act(self, f):
        cols = ({f.images[i] - 1: 1} if f.images[i] else {} for i in range(f.src))
        return GroupHom(self.value(f.src), self.value(f.tgt), IntMatrix(f.tgt, f.src, cols))

    def degree(self):
        return 1

    def text(self):
        return "lin"


class RedRep(FunctorExpr):
    """``h̄_{[k]}``: basis the nonzero pointed maps ``[k] -> [m]`` (each minus the zero map)."""

    def __init__(self, k: int):
        super().__init__()
        if k < 1:
            raise ValueError("rep needs k >= 1")
        self.k = k
        self._bases: dict = {}

    def basis(self, m):
        b = self._bases.get(m)
        if b is None:
            maps = [u for u in pointed_maps(self.k, m) if any(u.images)]
            b = (maps, {u: i for i, u in enumerate(maps)})
            self._bases[m] = b
        return b

    def _value(self, m):
        return FgAbGroup.free(len(self.basis(m)[0]))

    def _act(self, f):
        src, _ = self.basis(f.src)
        _, idx = self.basis(f.tgt)
        cols = []
        for u in src:
            w = pmap_compose(f, u)
            cols.append({idx[w]: 1} if any(w.images) else {})
        return GroupHom(self.value(f.src), self.value(f.tgt), IntMatrix(len(idx), len(src), cols))

    def degree(self):
        return self.k

    def text(self):
        return f"rep({self.k})"


class Tensor(FunctorExpr):
    def __init__(self, left: FunctorExpr, right: FunctorExpr):
        super().__init__()
        self.left, self.right = left, right

    def children(self):
        return [self.left, self.right]

    def _value(self, m):
        return tensor_group(self.left.value(m), self.right.value(m))

    def _act(self, f):
        return tensor_hom(self.left.act(f), self.right.act(f))

    def degree(self):
        a, b = self.left.degree(), self.right.degree()
        return None if a is None or b is None else a + b

    def text(self):
        return f"tensor({self.left.text()},{self.right.text()})"


class Pow(FunctorExpr):
    """``e^{⊗k}`` with the first factor most significant."""

    def __init__(self, base: FunctorExpr, k: int):
        super().__init__()
        if k < 1:
            raise ValueError("pow needs k >= 1")
        self.base, self.k = base, k
        inner = base
        for _ in range(k - 1):
            inner = Tensor(inner, base)
        self._inner = inner

    def children(self):
        return [self.base]

    def _value(self, m):
        return self._inner.value(m)

    def _act(self, f):
        return self._inner.act(f)

    def degree(self):
        d = self.base.degree()
        return None if d is None else d * self.k

    def text(self):
        return f"pow({self.base.text()},{self.k})"


def TensorPower(k: int) -> Pow:
    return Pow(Lin(), k)


class Sum(FunctorExpr):
    def __init__(self, left: FunctorExpr, right: FunctorExpr):
        super().__init__()
        self.left, self.right = left, right

    def children(self):
        return [self.left, self.right]

    def _value(self, m):
        return direct_sum([self.left.value(m), self.right.value(m)])

    def _act(self, f):
        return direct_sum_hom([self.left.act(f), self.right.act(f)])

    def degree(self):
        a, b = self.left.degree(), self.right.degree()
        return None if a is None or b is None else max(a, b)

    def text(self):
        return f"sum({self.left.text()},{self.right.text()})"


class Coef(FunctorExpr):
    """``e ⊗ G``."""

    def __init__(self, base: FunctorExpr, G: FgAbGroup, label: str | None = None):
        super().__init__()
        self.base, self.G = base, G
        self.label = label or G.describe().replace(" ", "")

    def children(self):
        return [self.base]

    def _value(self, m):
        return tensor_group(self.base.value(m), self.G)

    def _act(self, f):
        return tensor_hom(self.base.act(f), GroupHom.identity(self.G))

    def degree(self):
        return self.base.degree()

    def text(self):
        return f"coef({self.base.text()},{self.label})"


class _Quadratic(FunctorExpr):
    """Shared code for ``Sym2`` and ``Ext2`` of an expression with free values."""

    strict = False
    sign = 1
    tag = ""

    def __init__(self, base: FunctorExpr):
        super().__init__()
        self.base = base
        self._index: dict = {}

    def children(self):
        return [self.base]

    def pairs(self, d):
        p = self._index.get(d)
        if p is None:
            lst = [(i, j) for i in range(d) for j in range(i + int(self.strict), d)]
            p = (lst, {ij: n for n, ij in enumerate(lst)})
            self._index[d] = p
        return p

    def _free_rank(self, m):
        G = self.base.value(m)
        if G.relations.cols:
            raise ValueError(f"{self.tag} needs free values, {self.base} has relations at [{m}]")
        return G.ngens

    def _value(self, m):
        return FgAbGroup.free(len(self.pairs(self._free_rank(m))[0]))

    def _act(self, f):
        a, b = self._free_rank(f.src), self._free_rank(f.tgt)
        M = self.base.act(f).matrix
        src, _ = self.pairs(a)
        _, idx = self.pairs(b)
        cols = []
        for i, j in src:
            vi, vj = M.column(i), M.column(j)
            col: dict = {}
            for k, x in vi.items():
                for l, y in vj.items():
                    if k == l:
                        if self.strict:
                            continue
                        key, s = (k, l), 1
                    elif k < l:
                        key, s = (k, l), 1
                    else:
                        key, s = (l, k), self.sign
                    n = idx[key]
                    col[n] = col.get(n, 0) + s * x * y
            cols.append({n: v for n, v in col.items() if v})
        return GroupHom(self.value(f.src), self.value(f.tgt), IntMatrix(len(idx), len(src), cols))

    def degree(self):
        d = self.base.degree()
        return None if d is None else 2 * d

    def text(self):
        return f"{self.tag}({self.base.text()})"


class Sym2(_Quadratic):
    tag = "sym2"


class Ext2(_Quadratic):
    strict = True
    sign = -1
    tag = "ext2"


class Tab(FunctorExpr):
    """A window functor on ``Γ_N`` viewed as an expression (only ``[m]``, ``m <= N``)."""

    def __init__(self, functor: DiagFunctor, label: str = "tab"):
        super().__init__()
        self.functor = functor
        self.N = functor.category.N
        self.label = label

    @property
    def window(self):
        return self.N

    def _value(self, m):
        self.check_window(m)
        return self.functor.value(m)

    def _act(self, f):
        self.check_window(max(f.src, f.tgt))
        return self.functor.act(f)

    def text(self):
        return f"tab({self.label})"


def tabulate(expr: FunctorExpr, N: int, category=None) -> DiagFunctor:
    """Restrict an expression to the window ``Γ_N``."""
    C = category if category is not None else gamma_window(N)
    if C.N != N:
        raise ValueError("category window does not match N")
    if expr.window is not None and expr.window < N:
        raise WindowError(f"{expr} is only defined up to [{expr.window}]", N)
    return DiagFunctor(C, expr.value, expr.act, expr.text())


def load_tabulated(path: str) -> Tab:
    """Read a functor table written by ``DiagFunctor.to_json`` (with a ``window`` key)."""
    with open(path) as fh:
        obj = json.load(fh)
    N = obj.get("window")
    if N is None:
        m = re.fullmatch(r"(?:Γ|Gamma)_(\d+)", obj.get("category", ""))
        if not m:
            raise ValueError(f"{path}: cannot tell the window size")
        N = int(m.group(1))
    C = gamma_window(int(N))
    return Tab(DiagFunctor.from_json(C, obj, path), path)


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*|\d+|[(),]|[^\s(),]+)")


def _tokens(text):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot tokenize {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, want=None):
        t = self.peek()
        if t is None or (want is not None and t != want):
            raise ValueError(f"expected {want or 'token'} in {self.text!r}, got {t!r}")
        self.i += 1
        return t

    def raw_arg(self):
        # a group or a path: everything up to the matching close paren / comma
        depth, parts = 0, []
        while True:
            t = self.peek()
            if t is None:
                raise ValueError(f"unbalanced parentheses in {self.text!r}")
            if depth == 0 and t in (",", ")"):
                break
            depth += t == "("
            depth -= t == ")"
            parts.append(self.take())
        return "".join(parts)

    def expr(self) -> FunctorExpr:
        name = self.take().lower()
        if name == "lin":
            return Lin()
        self.take("(")
        if name == "const":
            g = self.raw_arg()
            out = Const(FgAbGroup.parse(g), g)
        elif name == "tab":
            out = load_tabulated(self.raw_arg())
        elif name in ("rep", "hbar"):
            out = RedRep(int(self.take()))
        elif name in ("tensor", "sum"):
            a = self.expr()
            self.take(",")
            b = self.expr()
            out = Tensor(a, b) if name == "tensor" else Sum(a, b)
        elif name == "pow":
            a = self.expr()
            self.take(",")
            out = Pow(a, int(self.take()))
        elif name == "coef":
            a = self.expr()
            self.take(",")
            g = self.raw_arg()
            out = Coef(a, FgAbGroup.parse(g), g)
        elif name in ("sym2", "ext2"):
            a = self.expr()
            out = Sym2(a) if name == "sym2" else Ext2(a)
        else:
            raise ValueError(f"unknown functor {name!r}")
        self.take(")")
        return out


def parse_expr(text: str) -> FunctorExpr:
    """Parse ``const(Z/2)``, ``lin``, ``rep(2)``, ``tensor(a,b)``, ``sum(a,b)``, ``pow(e,k)``,
    ``coef(e,G)``, ``sym2(e)``, ``ext2(e)`` and ``tab(path)``."""
    p = _Parser(text)
    e = p.expr()
    if p.peek() is not None:
        raise ValueError(f"trailing input in {text!r}")
    return e


def eval_expr(T: FunctorExpr, x, window: int | None = None):
    """Value at ``[x]`` (an int) or action of a pointed map, checked against ``window``."""
    size = x if isinstance(x, int) else max(x.src, x.tgt)
    if window is not None and size > window:
        raise WindowError(f"[{size}] lies outside the window Γ_{window}", size)
    T.check_window(size)
    return T.value(x) if isinstance(x, int) else T.act(x)
