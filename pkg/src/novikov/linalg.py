"""Exact linear algebra over base-ring contexts.

Constant matrices are lists (or tuples) of rows of payloads.  Solving and
rank go through the flattening of the context onto its terminal field
(rationals, prime residue fields, gaussian rationals) where deterministic
Gaussian elimination applies: pivots are chosen at the lowest row index.
"""

from __future__ import annotations

from .errors import CapabilityError, NotAUnitError
from .rings import Automorphism, RingCtx


# ---------------------------------------------------------------------------
# constant matrices over a context


def mat_identity(ctx: RingCtx, n: int):
    z, o = ctx.zero(), ctx.one()
    return [[o if i == j else z for j in range(n)] for i in range(n)]


def mat_zero(ctx: RingCtx, n: int, m: int):
    z = ctx.zero()
    return [[z for _ in range(m)] for _ in range(n)]


def mat_add(ctx: RingCtx, a, b):
    return [[ctx.add(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(ctx: RingCtx, a, b):
    return [[ctx.sub(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_neg(ctx: RingCtx, a):
    return [[ctx.neg(x) for x in row] for row in a]


def mat_mul(ctx: RingCtx, a, b):
    if not a or not b:
        return []
    n, k, m = len(a), len(b), len(b[0])
    kind = ctx.kind
    if kind in ("rationals", "integers"):
        # payloads support raw operators and truthiness
        zero = ctx.zero()
        out = []
        for i in range(n):
            ai = a[i]
            row = []
            for j in range(m):
                acc = None
                for t in range(k):
                    x = ai[t]
                    if x:
                        v = x * b[t][j]
                        acc = v if acc is None else acc + v
                row.append(zero if acc is None else acc)
            out.append(row)
        return out
    if kind == "integers-mod":
        mm = ctx.m
        out = []
        for i in range(n):
            ai = a[i]
            row = []
            for j in range(m):
                acc = 0
                for t in range(k):
                    x = ai[t]
                    if x:
                        acc += x * b[t][j]
                row.append(acc % mm)
            out.append(row)
        return out
    if kind == "matrix-ring" and getattr(ctx, "_raw_base_ops", False):
        # flatten blocks and run the raw triple loop over the base field
        s = ctx.size
        zero = ctx.base.zero()
        big_a = [
            [a[i][t][p][q] for t in range(k) for q in range(s)]
            for i in range(n) for p in range(s)
        ]
        big_b = [
            [b[t][j][p][q] for j in range(m) for q in range(s)]
            for t in range(k) for p in range(s)
        ]
        rows, inner, cols = n * s, k * s, m * s
        big = []
        for i in range(rows):
            ai = big_a[i]
            row = []
            for j in range(cols):
                acc = None
                for t in range(inner):
                    x = ai[t]
                    if x:
                        v = x * big_b[t][j]
                        acc = v if acc is None else acc + v
                row.append(zero if acc is None else acc)
            big.append(row)
        return [
            [
                tuple(
                    tuple(big[i * s + p][j * s + q] for q in range(s))
                    for p in range(s)
                )
                for j in range(m)
            ]
            for i in range(n)
        ]
    add, mul, zero = ctx.add, ctx.mul, ctx.zero()
    is_zero = ctx.is_zero
    out = []
    for i in range(n):
        ai = a[i]
        row = []
        for j in range(m):
            acc = zero
            for t in range(k):
                x = ai[t]
                if not is_zero(x):
                    acc = add(acc, mul(x, b[t][j]))
            row.append(acc)
        out.append(row)
    return out


def vec_mat(ctx: RingCtx, v, m):
    """Row vector times matrix."""
    if not m:
        return []
    add, mul, zero = ctx.add, ctx.mul, ctx.zero()
    cols = len(m[0])
    out = [zero] * cols
    for i, x in enumerate(v):
        if ctx.is_zero(x):
            continue
        mi = m[i]
        for j in range(cols):
            out[j] = add(out[j], mul(x, mi[j]))
    return out


def mat_eq(ctx: RingCtx, a, b) -> bool:
    return all(ctx.eq(x, y) for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def mat_is_zero(ctx: RingCtx, a) -> bool:
    return all(ctx.is_zero(x) for row in a for x in row)


def mat_rho(rho: Automorphism, k: int, a):
    if rho.is_identity or k == 0:
        return a
    ap = rho.apply
    return [[ap(x, k) for x in row] for row in a]


def vec_rho(rho: Automorphism, k: int, v):
    if rho.is_identity or k == 0:
        return v
    ap = rho.apply
    return tuple(ap(x, k) for x in v)


def freeze(m):
    return tuple(tuple(row) for row in m)


# ---------------------------------------------------------------------------
# Gaussian elimination over a terminal field context


def _gauss_solve_multi(fld, a, rhs_cols):
    """Solve a*y = b for each column b in rhs_cols; None where inconsistent.

    ``a`` is an m x n field matrix (consumed), ``rhs_cols`` a list of length-m
    columns.  Free variables are set to zero, so solutions are deterministic.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    k = len(rhs_cols)
    aug = [list(a[i]) + [rhs_cols[j][i] for j in range(k)] for i in range(m)]
    pivots = []
    row = 0
    for col in range(n):
        sel = None
        for r in range(row, m):
            if not fld.is_zero(aug[r][col]):
                sel = r
                break
        if sel is None:
            continue
        if sel != row:
            aug[row], aug[sel] = aug[sel], aug[row]
        inv = fld.invert(aug[row][col])
        aug[row] = [fld.mul(inv, x) for x in aug[row]]
        prow = aug[row]
        for r in range(m):
            if r != row and not fld.is_zero(aug[r][col]):
                c = aug[r][col]
                aug[r] = [fld.sub(x, fld.mul(c, p)) for x, p in zip(aug[r], prow)]
        pivots.append(col)
        row += 1
        if row == m:
            break
    sols = []
    for j in range(k):
        consistent = all(
            fld.is_zero(aug[r][n + j]) for r in range(row, m)
        )
        if not consistent:
            sols.append(None)
            continue
        y = [fld.zero()] * n
        for r, col in enumerate(pivots):
            y[col] = aug[r][n + j]
        sols.append(y)
    return sols


def solve_row_system(fld, mat, rhs_row):
    """Solve x * mat = rhs over a commutative field context (row unknowns)."""
    if not mat:
        return [] if all(fld.is_zero(v) for v in rhs_row) else None
    p, q = len(mat), len(mat[0])
    at = [[mat[i][j] for i in range(p)] for j in range(q)]
    sol = _gauss_solve_multi(fld, at, [list(rhs_row)])[0]
    return sol


def field_rank(fld, mat) -> int:
    if not mat or not mat[0]:
        return 0
    work = [list(r) for r in mat]
    m, n = len(work), len(work[0])
    rank = 0
    for col in range(n):
        sel = None
        for r in range(rank, m):
            if not fld.is_zero(work[r][col]):
                sel = r
                break
        if sel is None:
            continue
        work[rank], work[sel] = work[sel], work[rank]
        inv = fld.invert(work[rank][col])
        prow = [fld.mul(inv, x) for x in work[rank]]
        work[rank] = prow
        for r in range(rank + 1, m):
            if not fld.is_zero(work[r][col]):
                c = work[r][col]
                work[r] = [fld.sub(x, fld.mul(c, p)) for x, p in zip(work[r], prow)]
        rank += 1
        if rank == m:
            break
    return rank


def det_const(fld, mat):
    """Determinant of a square field matrix by elimination."""
    n = len(mat)
    if n == 0:
        return fld.one()
    work = [list(r) for r in mat]
    det = fld.one()
    for col in range(n):
        sel = None
        for r in range(col, n):
            if not fld.is_zero(work[r][col]):
                sel = r
                break
        if sel is None:
            return fld.zero()
        if sel != col:
            work[col], work[sel] = work[sel], work[col]
            det = fld.neg(det)
        pivot = work[col][col]
        det = fld.mul(det, pivot)
        inv = fld.invert(pivot)
        for r in range(col + 1, n):
            if not fld.is_zero(work[r][col]):
                c = fld.mul(work[r][col], inv)
                work[r] = [
                    fld.sub(x, fld.mul(c, p)) for x, p in zip(work[r], work[col])
                ]
    return det


def lagrange_interpolate(fld, points, values):
    """Coefficients (low to high) of the polynomial through (points, values)."""
    n = len(points)
    coeffs = [fld.zero()] * n
    for i in range(n):
        # numerator polynomial prod_{j!=i} (x - p_j), scaled
        num = [fld.one()]
        denom = fld.one()
        for j in range(n):
            if j == i:
                continue
            num = _poly_mul_linear(fld, num, fld.neg(points[j]))
            denom = fld.mul(denom, fld.sub(points[i], points[j]))
        scale = fld.mul(values[i], fld.invert(denom))
        for d in range(len(num)):
            coeffs[d] = fld.add(coeffs[d], fld.mul(scale, num[d]))
    return coeffs


def _poly_mul_linear(fld, poly, c):
    # poly(x) * (x + c)
    out = [fld.zero()] * (len(poly) + 1)
    for d, a in enumerate(poly):
        out[d + 1] = fld.add(out[d + 1], a)
        out[d] = fld.add(out[d], fld.mul(a, c))
    return out


# ---------------------------------------------------------------------------
# flattening-backed operations over arbitrary field-flattenable contexts


def _require_flat(ctx: RingCtx):
    if ctx.flat_dim is None:
        raise CapabilityError(f"{ctx.kind} is not field-flattenable")
    return ctx.field()


def flatten_rows(ctx: RingCtx, mat):
    """Block-flatten an A-matrix into its terminal-field right-rep grid."""
    fld = _require_flat(ctx)
    d = ctx.flat_dim
    if not mat:
        return fld, []
    p, q = len(mat), len(mat[0])
    out = [[fld.zero()] * (q * d) for _ in range(p * d)]
    for i in range(p):
        for j in range(q):
            blk = ctx.right_rep(mat[i][j])
            for t in range(d):
                row = out[i * d + t]
                brow = blk[t]
                for u in range(d):
                    row[j * d + u] = brow[u]
    return fld, out


def _flatten_vec(ctx: RingCtx, vec):
    out = []
    for x in vec:
        out.extend(ctx.coords(x))
    return out


def _unflatten_vec(ctx: RingCtx, flat, width):
    d = ctx.flat_dim
    return [ctx.uncoords(flat[i * d : (i + 1) * d]) for i in range(width)]


def solve_row(ctx: RingCtx, mat, rhs):
    """Solve x * mat = rhs over A; returns the row x or None (no solution)."""
    fld = _require_flat(ctx)
    if not mat:
        return [] if all(ctx.is_zero(v) for v in rhs) else None
    _, big = flatten_rows(ctx, mat)
    sol = solve_row_system(fld, big, _flatten_vec(ctx, rhs))
    if sol is None:
        return None
    return _unflatten_vec(ctx, sol, len(mat))


def rank_rows(ctx: RingCtx, mat) -> int:
    """Rank of the flattened matrix (terminal-field dimensions)."""
    fld = _require_flat(ctx)
    if not mat:
        return 0
    _, big = flatten_rows(ctx, mat)
    return field_rank(fld, big)


def invert_matrix(ctx: RingCtx, mat):
    """Two-sided inverse of a square A-matrix, or None if singular.

    Integer matrices are inverted through the rationals with an exact
    integrality check (unit iff the rational inverse is integral).
    """
    n = len(mat)
    if n == 0:
        return []
    if ctx.kind == "integers":
        from gmpy2 import mpq

        from .rings import Rationals

        inv = invert_matrix(Rationals(), [[mpq(x) for x in row] for row in mat])
        if inv is None:
            return None
        out = []
        for row in inv:
            ints = []
            for x in row:
                if x.denominator != 1:
                    return None
                ints.append(int(x))
            out.append(ints)
        return out
    fld = _require_flat(ctx)
    d = ctx.flat_dim
    _, big = flatten_rows(ctx, mat)
    nd = n * d
    bigt = [[big[i][j] for i in range(nd)] for j in range(nd)]
    ident = mat_identity(ctx, n)
    rhs_cols = [_flatten_vec(ctx, ident[i]) for i in range(n)]
    sols = _gauss_solve_multi(fld, bigt, rhs_cols)
    if any(s is None for s in sols):
        return None
    inv = [_unflatten_vec(ctx, s, n) for s in sols]
    if not mat_eq(ctx, mat_mul(ctx, mat, inv), ident):
        return None
    return inv


def invert_matrix_or_raise(ctx: RingCtx, mat):
    inv = invert_matrix(ctx, mat)
    if inv is None:
        raise NotAUnitError(
            "constant matrix is singular over the base ring",
            witness="flattened system unsolvable",
        )
    return inv


def is_idempotent(ctx: RingCtx, mat) -> bool:
    return mat_eq(ctx, mat_mul(ctx, mat, mat), mat)
