"""Integer matrices with sparse column storage.

Columns are stored as ``{row: value}`` dicts holding only nonzero entries.
Python integers are arbitrary precision, so nothing here can overflow.
"""

from __future__ import annotations

from typing import Iterable, Sequence


def _clean(col):
    return {i: v for i, v in col.items() if v}


def add_scaled(dst: dict, src: dict, factor: int) -> None:
    """dst += factor * src, in place, dropping zeros."""
    if not factor:
        return
    for i, v in src.items():
        nv = dst.get(i, 0) + factor * v
        if nv:
            dst[i] = nv
        else:
            dst.pop(i, None)


class IntMatrix:
    """Immutable ``rows x cols`` integer matrix.

    Zero-sized shapes are legal and behave as the zero map between the
    corresponding free groups.
    """

    __slots__ = ("rows", "cols", "_cols", "_hash")

    def __init__(self, rows: int, cols: int, columns: Iterable[dict] | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimension")
        self.rows = rows
        self.cols = cols
        if columns is None:
            self._cols = tuple({} for _ in range(cols))
        else:
            cs = tuple(_clean(c) for c in columns)
            if len(cs) != cols:
                raise ValueError(f"expected {cols} columns, got {len(cs)}")
            for c in cs:
                for i in c:
                    if not 0 <= i < rows:
                        raise ValueError(f"row index {i} out of range for {rows} rows")
            self._cols = cs
        self._hash = None

    # ---- constructors -------------------------------------------------
    @classmethod
    def from_rows(cls, data: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        columns = [{} for _ in range(cols)]
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged row data")
            for j, v in enumerate(row):
                if v:
                    columns[j][i] = int(v)
        return cls(rows, cols, columns)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence) -> "IntMatrix":
        cs = []
        for c in columns:
            if isinstance(c, dict):
                cs.append(c)
            else:
                if len(c) != rows:
                    raise ValueError("column length mismatch")
                cs.append({i: int(v) for i, v in enumerate(c) if v})
        return cls(rows, len(cs), cs)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, ({i: 1} for i in range(n)))

    @classmethod
    def diagonal(cls, entries: Sequence[int], rows: int | None = None, cols: int | None = None):
        rows = len(entries) if rows is None else rows
        cols = len(entries) if cols is None else cols
        return cls(rows, cols, ({j: entries[j]} if j < len(entries) else {} for j in range(cols)))

    # ---- access -------------------------------------------------------
    @property
    def shape(self):
        return (self.rows, self.cols)

    def column(self, j: int) -> dict:
        return self._cols[j]

    def columns(self):
        return self._cols

    def entry(self, i: int, j: int) -> int:
        return self._cols[j].get(i, 0)

    def to_rows(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for j, c in enumerate(self._cols):
            for i, v in c.items():
                out[i][j] = v
        return out

    def row_dicts(self) -> list[dict]:
        out = [{} for _ in range(self.rows)]
        for j, c in enumerate(self._cols):
            for i, v in c.items():
                out[i][j] = v
        return out

    def nnz(self) -> int:
        return sum(len(c) for c in self._cols)

    def is_zero(self) -> bool:
        return not any(self._cols)

    # ---- algebra ------------------------------------------------------
    def apply(self, vec: dict) -> dict:
        """Matrix times sparse vector."""
        out: dict = {}
        for j, x in vec.items():
            if x:
                add_scaled(out, self._cols[j], x)
        return out

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return IntMatrix(self.rows, other.cols, (self.apply(c) for c in other._cols))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        cols = []
        for a, b in zip(self._cols, other._cols):
            c = dict(a)
            add_scaled(c, b, 1)
            cols.append(c)
        return IntMatrix(self.rows, self.cols, cols)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, ({i: -v for i, v in c.items()} for c in self._cols))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, ({i: k * v for i, v in c.items()} for c in self._cols))

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, self.row_dicts())

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.shape == other.shape and self._cols == other._cols

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, tuple(tuple(sorted(c.items())) for c in self._cols)))
        return self._hash

    def __repr__(self):
        if self.rows * self.cols <= 64:
            return f"IntMatrix({self.to_rows()!r})"
        return f"IntMatrix<{self.rows}x{self.cols}, nnz={self.nnz()}>"

    def submatrix(self, row_ids: Sequence[int], col_ids: Sequence[int]) -> "IntMatrix":
        pos = {r: k for k, r in enumerate(row_ids)}
        cols = []
        for j in col_ids:
            cols.append({pos[i]: v for i, v in self._cols[j].items() if i in pos})
        return IntMatrix(len(row_ids), len(col_ids), cols)

    # ---- JSON ---------------------------------------------------------
    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "data": self.to_rows()}

    @classmethod
    def from_json(cls, obj: dict) -> "IntMatrix":
        return cls.from_rows(obj["data"], cols=obj["cols"]) if obj["rows"] else cls(0, obj["cols"])


def hstack(mats: Sequence[IntMatrix], rows: int | None = None) -> IntMatrix:
    if rows is None:
        if not mats:
            raise ValueError("need rows for an empty hstack")
        rows = mats[0].rows
    cols = []
    for m in mats:
        if m.rows != rows:
            raise ValueError("row mismatch in hstack")
        cols.extend(m.columns())
    return IntMatrix(rows, len(cols), cols)


def vstack(mats: Sequence[IntMatrix], cols: int | None = None) -> IntMatrix:
    if cols is None:
        if not mats:
            raise ValueError("need cols for an empty vstack")
        cols = mats[0].cols
    out = [{} for _ in range(cols)]
    off = 0
    for m in mats:
        if m.cols != cols:
            raise ValueError("column mismatch in vstack")
        for j, c in enumerate(m.columns()):
            for i, v in c.items():
                out[j][i + off] = v
        off += m.rows
    return IntMatrix(off, cols, out)


def block_diag(mats: Sequence[IntMatrix]) -> IntMatrix:
    rows = sum(m.rows for m in mats)
    cols = []
    off = 0
    for m in mats:
        for c in m.columns():
            cols.append({i + off: v for i, v in c.items()})
        off += m.rows
    return IntMatrix(rows, len(cols), cols)


def kron(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    """Kronecker product; index (i, k) of the result is ``i * b.rows + k``."""
    cols = []
    for ca in a.columns():
        for cb in b.columns():
            col = {}
            for i, x in ca.items():
                base = i * b.rows
                for k, y in cb.items():
                    col[base + k] = x * y
            cols.append(col)
    return IntMatrix(a.rows * b.rows, a.cols * b.cols, cols)
