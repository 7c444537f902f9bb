"""Exact dense linear algebra over a finite field (matrices of element codes)."""

from __future__ import annotations

from .ff import Field


def rref(rows, F: Field, ncols: int | None = None):
    """Reduced row echelon form.

    Columns are scanned left to right, so the caller controls pivot priority
    through the column order.  Returns ``(rows, pivots)`` with every pivot
    entry equal to 1 and zero elsewhere in its column.
    """
    m = [list(r) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    mul, add, neg, inv = F.mul, F.add, F.neg_t, F.inv
    pivots = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        row = m[r]
        s = inv(row[c])
        if s != 1:
            row = [mul(x, s) for x in row]
            m[r] = row
        nz = [j for j in range(c, ncols) if row[j]]
        for i in range(nrows):
            if i != r:
                other = m[i]
                f = other[c]
                if f:
                    nf = neg[f]
                    for j in nz:
                        other[j] = add(other[j], mul(nf, row[j]))
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m[:r], pivots


def rank(rows, F: Field, ncols: int | None = None) -> int:
    return len(rref(rows, F, ncols)[1])


def nullspace(rows, F: Field, ncols: int):
    """Basis of {x : A x = 0} for A given by ``rows``, in deterministic order.

    Each basis vector has a 1 at one free column and zeros at the other free
    columns (the standard RREF kernel basis).
    """
    red, pivots = rref(rows, F, ncols) if rows else ([], [])
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    neg = F.neg_t
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for row, pc in zip(red, pivots):
            if row[fc]:
                v[pc] = neg[row[fc]]
        basis.append(v)
    return basis


def in_span(vec, red, pivots, F: Field) -> bool:
    """Whether ``vec`` lies in the row space of an RREF matrix."""
    v = list(vec)
    mul, add, neg = F.mul, F.add, F.neg_t
    for row, pc in zip(red, pivots):
        f = v[pc]
        if f:
            nf = neg[f]
            for j, x in enumerate(row):
                if x:
                    v[j] = add(v[j], mul(nf, x))
    return not any(v)


def mat_mul(a, b, F: Field):
    mul, add = F.mul, F.add
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = 0
            for t in range(k):
                if a[i][t] and b[t][j]:
                    s = add(s, mul(a[i][t], b[t][j]))
            row.append(s)
        out.append(row)
    return out
