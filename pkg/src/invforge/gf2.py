"""GF(2) linear algebra on int bitset rows (bit j = column j)."""

from __future__ import annotations

from typing import List, Sequence, Tuple


def rref(rows: Sequence[int], ncols: int) -> Tuple[List[int], List[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    work = [r for r in rows if r]
    out: List[int] = []
    pivots: List[int] = []
    for col in range(ncols):
        bit = 1 << col
        pivot_row = None
        for i, r in enumerate(work):
            if r & bit:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        row = work.pop(pivot_row)
        work = [r ^ row if r & bit else r for r in work]
        out = [r ^ row if r & bit else r for r in out]
        out.append(row)
        pivots.append(col)
        if not work:
            break
    return out, pivots


def rank(rows: Sequence[int], ncols: int) -> int:
    return len(rref(rows, ncols)[0])


def kernel_basis(rows: Sequence[int], ncols: int) -> List[int]:
    """Basis of {v : row . v = 0 for all rows}, one vector per free column."""
    reduced, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = 1 << free
        for row, pc in zip(reduced, pivots):
            if row & (1 << free):
                v |= 1 << pc
        basis.append(v)
    return basis


def solve_affine_ones(points: Sequence[int], nvars: int):
    """Solutions c = (c0, c1..cn) of c0 + sum(c_i * x_i) = 1 on every point.

    Points are variable bitmasks; vectors use bit 0 for the constant and
    bit i+1 for variable i.  Returns (particular, homogeneous_basis), or
    None when the system is unsolvable.
    """
    ncols = nvars + 1
    rows = [((x << 1) | 1) for x in points]
    # Append the all-ones target as an extra column; solutions of the
    # augmented homogeneous system that use it give particular solutions.
    aug = [r | (1 << ncols) for r in rows]
    for v in kernel_basis(aug, ncols + 1):
        if v & (1 << ncols):
            particular = v & ((1 << ncols) - 1)
            break
    else:
        return None
    return particular, kernel_basis(rows, ncols)


def mat_vec(rows: Sequence[int], v: int) -> int:
    """Matrix-vector product over GF(2); rows index the output bits."""
    out = 0
    for i, r in enumerate(rows):
        if (r & v).bit_count() & 1:
            out |= 1 << i
    return out


def transpose(rows: Sequence[int], ncols: int) -> List[int]:
    out = [0] * ncols
    for i, r in enumerate(rows):
        while r:
            low = r & -r
            out[low.bit_length() - 1] |= 1 << i
            r ^= low
    return out


def mat_mul(a: Sequence[int], b: Sequence[int], ncols: int) -> List[int]:
    """Row-major product a @ b (rows of the result span ncols columns)."""
    bt = transpose(b, ncols)
    out = []
    for r in a:
        acc = 0
        for j, col in enumerate(bt):
            if (r & col).bit_count() & 1:
                acc |= 1 << j
        out.append(acc)
    return out


def identity(n: int) -> List[int]:
    return [1 << i for i in range(n)]


def is_invertible(rows: Sequence[int], n: int) -> bool:
    return rank(rows, n) == n
