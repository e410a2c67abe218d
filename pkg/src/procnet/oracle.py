"""Pure functional reference for the matrix-multiply networks.

Layout convention: the left matrix travels by rows (ass, n rows of length m),
the right matrix by columns (bss, k columns of length m), and the result by
columns (css, k columns of length n). All arithmetic wraps at the given
word width, folding right with the seed innermost, exactly as the process
networks compute it.
"""

from dataclasses import dataclass

from .words import DEFAULT_WIDTH, wrap


def zip_mul(xs, ys, width=DEFAULT_WIDTH):
    return [wrap(x * y, width) for x, y in zip(xs, ys)]


def fold_sum(xs, width=DEFAULT_WIDTH):
    acc = 0
    for x in reversed(xs):
        acc = wrap(x + acc, width)
    return acc


def scalar_product(xs, ys, width=DEFAULT_WIDTH):
    if len(xs) != len(ys):
        raise ValueError(f"scalar_product: length mismatch {len(xs)} vs {len(ys)}")
    return fold_sum(zip_mul(xs, ys, width), width)


def column_product(ass_rows, bs, width=DEFAULT_WIDTH):
    """One result column: the scalar product of every row with `bs`."""
    return [scalar_product(row, bs, width) for row in ass_rows]


def matrix_product(ass_rows, bss_cols, width=DEFAULT_WIDTH):
    """css by columns. Empty operands are legal here; the process networks
    reject them at construction instead."""
    m = len(ass_rows[0]) if ass_rows else 0
    for row in ass_rows:
        if len(row) != m:
            raise ValueError("matrix_product: ragged left matrix")
    for col in bss_cols:
        if len(col) != m:
            raise ValueError(f"matrix_product: column length {len(col)} "
                             f"does not match row length {m}")
    return [column_product(ass_rows, bs, width) for bs in bss_cols]


def brute_force_product(ass_rows, bss_cols, width=DEFAULT_WIDTH):
    """Independent check: plain index arithmetic, no shared helpers."""
    n = len(ass_rows)
    m = len(ass_rows[0]) if ass_rows else 0
    k = len(bss_cols)
    css = []
    for j in range(k):
        col = []
        for i in range(n):
            acc = 0
            for t in range(m - 1, -1, -1):
                acc = wrap(wrap(ass_rows[i][t] * bss_cols[j][t], width) + acc,
                           width)
            col.append(acc)
        css.append(col)
    return css


@dataclass(frozen=True)
class Matrix:
    """A dense matrix with an explicit storage orientation."""

    n: int          # rows
    m: int          # cols
    data: tuple     # tuple of tuples, outer axis per `orientation`
    orientation: str  # "by_rows" or "by_cols"

    def __post_init__(self):
        if self.orientation not in ("by_rows", "by_cols"):
            raise ValueError(f"bad orientation {self.orientation!r}")
        outer, inner = ((self.n, self.m) if self.orientation == "by_rows"
                        else (self.m, self.n))
        if len(self.data) != outer or any(len(v) != inner for v in self.data):
            raise ValueError("matrix data does not match declared dimensions")

    @classmethod
    def from_rows(cls, rows):
        rows = tuple(tuple(r) for r in rows)
        return cls(len(rows), len(rows[0]) if rows else 0, rows, "by_rows")

    @classmethod
    def from_cols(cls, cols):
        cols = tuple(tuple(c) for c in cols)
        return cls(len(cols[0]) if cols else 0, len(cols), cols, "by_cols")

    def rows(self):
        if self.orientation == "by_rows":
            return [list(r) for r in self.data]
        return [[self.data[j][i] for j in range(self.m)] for i in range(self.n)]

    def cols(self):
        if self.orientation == "by_cols":
            return [list(c) for c in self.data]
        return [[self.data[i][j] for i in range(self.n)] for j in range(self.m)]
