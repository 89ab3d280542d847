"""Matrices over twisted rings.

A TwistedMatrix is stored as a sparse map degree -> constant coefficient
matrix, i.e. M = sum_d z^d M_d.  It acts on row vectors x -> x*M, and the
product follows the twisted rule (z^i A)(z^j B) = z^(i+j) rho^j(A) B.

Includes power-series inversion with invertible constant term (the
degree-by-degree recurrence), reduction of constant-term-identity matrices
to upper triangular form with Witt-vector diagonal via replayable elementary
row operations, relative F-torsion against the augmentation, degree-shift
maps, block swaps, and the commutative determinant oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf

from . import linalg, series as ts
from .errors import (
    CapabilityError,
    ContextMismatchError,
    FlavorError,
    NotInvertibleError,
    PrecisionError,
)
from .series import SERIES, LAURENT, NOVIKOV, POLY, TwistCtx, TwistedSeries, _JOIN


class _RhoCache:
    """Cache of rho^k applied entrywise to fixed coefficient matrices."""

    def __init__(self, ctx: TwistCtx, coeffs: dict):
        self.rho = ctx.rho
        self.coeffs = coeffs
        self._cache = {}

    def get(self, d: int, k: int):
        if self.rho.is_identity:
            return self.coeffs[d]
        if self.rho.period is not None:
            k %= self.rho.period
        if k == 0:
            return self.coeffs[d]
        key = (d, k)
        got = self._cache.get(key)
        if got is None:
            got = linalg.freeze(linalg.mat_rho(self.rho, k, self.coeffs[d]))
            self._cache[key] = got
        return got


class TwistedMatrix:
    __slots__ = ("ctx", "flavor", "nrows", "ncols", "coeffs", "precision")

    def __init__(self, ctx: TwistCtx, flavor: str, nrows: int, ncols: int, coeffs: dict,
                 precision=inf, _clip=False):
        if flavor not in ts.FLAVORS:
            raise FlavorError(f"unknown flavor {flavor!r}")
        if flavor in (POLY, LAURENT) and precision != inf:
            raise FlavorError(f"{flavor} requires infinite precision")
        ring = ctx.ring
        clean = {}
        for d, m in coeffs.items():
            if d >= precision:
                if _clip:
                    continue
                raise PrecisionError(f"coefficient matrix at degree {d} beyond precision")
            if d < 0 and flavor in (POLY, SERIES):
                raise FlavorError(f"negative degree {d} in {flavor} flavor")
            frozen = linalg.freeze(m)
            if len(frozen) != nrows or any(len(r) != ncols for r in frozen):
                raise ContextMismatchError("coefficient matrix shape mismatch")
            if not linalg.mat_is_zero(ring, frozen):
                clean[d] = frozen
        self.ctx = ctx
        self.flavor = flavor
        self.nrows = nrows
        self.ncols = ncols
        self.coeffs = clean
        self.precision = precision

    # -- constructors -------------------------------------------------------
    @staticmethod
    def identity(ctx: TwistCtx, n: int, flavor: str = POLY, precision=inf):
        return TwistedMatrix(ctx, flavor, n, n, {0: linalg.mat_identity(ctx.ring, n)}, precision)

    @staticmethod
    def zeros(ctx: TwistCtx, n: int, m: int, flavor: str = POLY, precision=inf):
        return TwistedMatrix(ctx, flavor, n, m, {}, precision)

    @staticmethod
    def from_const(ctx: TwistCtx, mat, flavor: str = POLY, precision=inf):
        mat = linalg.freeze(mat)
        return TwistedMatrix(ctx, flavor, len(mat), len(mat[0]) if mat else 0,
                             {0: mat}, precision)

    @staticmethod
    def monomial(ctx: TwistCtx, degree: int, mat, flavor: str | None = None, precision=inf):
        mat = linalg.freeze(mat)
        if flavor is None:
            flavor = POLY if degree >= 0 else LAURENT
        return TwistedMatrix(ctx, flavor, len(mat), len(mat[0]) if mat else 0,
                             {degree: mat}, precision)

    @staticmethod
    def from_entries(ctx: TwistCtx, grid):
        """Build from a grid of TwistedSeries sharing ctx; flavor is the join."""
        nrows = len(grid)
        ncols = len(grid[0]) if nrows else 0
        flavor = POLY
        precision = inf
        for row in grid:
            if len(row) != ncols:
                raise ContextMismatchError("ragged entry grid")
            for s in row:
                if s.ctx != ctx:
                    raise ContextMismatchError("entry context differs")
                flavor = _JOIN[(flavor, s.flavor)]
                precision = min(precision, s.precision)
        coeffs = {}
        zero = ctx.ring.zero()
        for i, row in enumerate(grid):
            for j, s in enumerate(row):
                for d, a in s.coeffs.items():
                    if d >= precision:
                        continue
                    m = coeffs.get(d)
                    if m is None:
                        m = [[zero] * ncols for _ in range(nrows)]
                        coeffs[d] = m
                    m[i][j] = a
        return TwistedMatrix(ctx, flavor, nrows, ncols, coeffs, precision, _clip=True)

    # -- views ---------------------------------------------------------------
    def entry(self, i: int, j: int) -> TwistedSeries:
        coeffs = {d: m[i][j] for d, m in self.coeffs.items()}
        return ts.from_payload_map(self.ctx, self.flavor, coeffs, self.precision)

    def entries(self):
        return [[self.entry(i, j) for j in range(self.ncols)] for i in range(self.nrows)]

    def coeff_matrix(self, d: int):
        if d >= self.precision:
            raise PrecisionError(f"degree {d} beyond matrix precision")
        got = self.coeffs.get(d)
        if got is None:
            return linalg.freeze(linalg.mat_zero(self.ctx.ring, self.nrows, self.ncols))
        return got

    @property
    def lower(self):
        return min(self.coeffs) if self.coeffs else inf

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def support(self):
        return sorted(self.coeffs)

    def __repr__(self):
        return (f"<TwistedMatrix {self.nrows}x{self.ncols} {self.flavor} "
                f"degrees={self.support()} prec={self.precision}>")

    def __eq__(self, other):
        return (isinstance(other, TwistedMatrix)
                and self.ctx == other.ctx and self.flavor == other.flavor
                and (self.nrows, self.ncols) == (other.nrows, other.ncols)
                and self.precision == other.precision and self.coeffs == other.coeffs)

    # -- arithmetic -----------------------------------------------------------
    def _join(self, other: "TwistedMatrix"):
        if self.ctx != other.ctx:
            raise ContextMismatchError("matrix contexts differ")
        return _JOIN[(self.flavor, other.flavor)]

    def add(self, other: "TwistedMatrix"):
        flavor = self._join(other)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ContextMismatchError("matrix dimensions differ")
        ring = self.ctx.ring
        prec = min(self.precision, other.precision)
        out = {d: [list(r) for r in m] for d, m in self.coeffs.items()}
        for d, m in other.coeffs.items():
            if d in out:
                out[d] = linalg.mat_add(ring, out[d], m)
            else:
                out[d] = m
        return TwistedMatrix(self.ctx, flavor, self.nrows, self.ncols, out, prec, _clip=True)

    def neg(self):
        ring = self.ctx.ring
        out = {d: linalg.mat_neg(ring, m) for d, m in self.coeffs.items()}
        return TwistedMatrix(self.ctx, self.flavor, self.nrows, self.ncols, out, self.precision)

    def sub(self, other):
        return self.add(other.neg())

    def mul(self, other: "TwistedMatrix"):
        flavor = self._join(other)
        if self.ncols != other.nrows:
            raise ContextMismatchError("inner dimensions differ")
        ring = self.ctx.ring
        prec = min(self.precision + other.lower, other.precision + self.lower)
        cache = _RhoCache(self.ctx, self.coeffs)
        out = {}
        for d2, m2 in other.coeffs.items():
            for d1 in self.coeffs:
                d = d1 + d2
                if d >= prec:
                    continue
                term = linalg.mat_mul(ring, cache.get(d1, d2), m2)
                if d in out:
                    out[d] = linalg.mat_add(ring, out[d], term)
                else:
                    out[d] = term
        return TwistedMatrix(self.ctx, flavor, self.nrows, other.ncols, out, prec, _clip=True)

    __add__ = add
    __sub__ = sub
    __mul__ = mul
    __neg__ = neg

    def shift(self, k: int):
        """Left multiplication by z^k: degrees move, coefficients unchanged."""
        if k == 0:
            return self
        out = {d + k: m for d, m in self.coeffs.items()}
        flavor = self.flavor
        if flavor in (POLY, SERIES) and out and min(out) < 0:
            flavor = LAURENT if flavor == POLY else NOVIKOV
        prec = self.precision if self.precision == inf else self.precision + k
        return TwistedMatrix(self.ctx, flavor, self.nrows, self.ncols, out, prec)

    def truncate(self, n):
        if n > self.precision:
            raise PrecisionError(f"cannot escalate precision {self.precision} to {n}")
        if n == self.precision:
            return self
        flavor = self.flavor
        if flavor in (POLY, LAURENT) and n != inf:
            flavor = SERIES if flavor == POLY else NOVIKOV
        out = {d: m for d, m in self.coeffs.items() if d < n}
        return TwistedMatrix(self.ctx, flavor, self.nrows, self.ncols, out, n)

    def with_flavor(self, flavor: str):
        """Promote, or demote a matrix that satisfies the target invariants."""
        if flavor == self.flavor:
            return self
        if flavor in (POLY, LAURENT) and self.precision != inf:
            raise FlavorError(f"cannot view a truncated matrix in {flavor}")
        # degree legality is enforced by the constructor
        return TwistedMatrix(self.ctx, flavor, self.nrows, self.ncols, self.coeffs, self.precision)

    def agrees_with(self, other: "TwistedMatrix", n) -> bool:
        if self.ctx != other.ctx or (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ContextMismatchError("incomparable matrices")
        if self.precision < n or other.precision < n:
            raise PrecisionError("insufficient precision for comparison window")
        ring = self.ctx.ring
        degs = set(self.coeffs) | set(other.coeffs)
        for d in degs:
            if d >= n:
                continue
            a = self.coeffs.get(d)
            b = other.coeffs.get(d)
            if a is None:
                if not linalg.mat_is_zero(ring, b):
                    return False
            elif b is None:
                if not linalg.mat_is_zero(ring, a):
                    return False
            elif not linalg.mat_eq(ring, a, b):
                return False
        return True

    def is_identity_mod(self, n) -> bool:
        return self.agrees_with(
            TwistedMatrix.identity(self.ctx, self.nrows, self.flavor), n
        )


def mat_arith(op: str, m: TwistedMatrix, n: TwistedMatrix | None = None) -> TwistedMatrix:
    if op == "neg":
        return m.neg()
    if op == "add":
        return m.add(n)
    if op == "mul":
        return m.mul(n)
    raise CapabilityError(f"unknown matrix operation {op!r}")


def block_diag(mats) -> TwistedMatrix:
    mats = list(mats)
    ctx = mats[0].ctx
    flavor = mats[0].flavor
    prec = mats[0].precision
    for m in mats[1:]:
        if m.ctx != ctx:
            raise ContextMismatchError("block contexts differ")
        flavor = _JOIN[(flavor, m.flavor)]
        prec = min(prec, m.precision)
    ring = ctx.ring
    nrows = sum(m.nrows for m in mats)
    ncols = sum(m.ncols for m in mats)
    zero = ring.zero()
    out = {}
    roff = coff = 0
    for m in mats:
        for d, blk in m.coeffs.items():
            if d >= prec:
                continue
            tgt = out.get(d)
            if tgt is None:
                tgt = [[zero] * ncols for _ in range(nrows)]
                out[d] = tgt
            for i, row in enumerate(blk):
                ti = tgt[roff + i]
                for j, x in enumerate(row):
                    ti[coff + j] = x
        roff += m.nrows
        coff += m.ncols
    return TwistedMatrix(ctx, flavor, nrows, ncols, out, prec, _clip=True)


# ---------------------------------------------------------------------------
# invertible pairs


class InvertiblePair:
    """(alpha, beta = alpha^-1) with both products verified to a precision."""

    __slots__ = ("alpha", "beta", "verified_to")

    def __init__(self, alpha: TwistedMatrix, beta: TwistedMatrix, n=None, verify: bool = True):
        if alpha.ctx != beta.ctx:
            raise ContextMismatchError("pair contexts differ")
        if not alpha.is_square() or alpha.nrows != beta.nrows or not beta.is_square():
            raise ContextMismatchError("pair matrices must be square of equal size")
        ab = alpha.mul(beta)
        ba = beta.mul(alpha)
        window = min(ab.precision, ba.precision)
        if n is None:
            n = window
        if verify:
            if window < n:
                raise PrecisionError(f"cannot verify inverse to {n}; window is {window}")
            if not ab.is_identity_mod(n):
                raise NotInvertibleError("alpha*beta != 1", witness=repr(ab))
            if not ba.is_identity_mod(n):
                raise NotInvertibleError("beta*alpha != 1", witness=repr(ba))
        self.alpha = alpha
        self.beta = beta
        self.verified_to = n

    @property
    def size(self) -> int:
        return self.alpha.nrows

    def __repr__(self):
        return f"<InvertiblePair n={self.size} verified_to={self.verified_to}>"


def constant_pair(ctx: TwistCtx, mat, flavor: str = POLY) -> InvertiblePair:
    """Invertible pair for a constant matrix with exact inverse."""
    inv = linalg.invert_matrix_or_raise(ctx.ring, [list(r) for r in mat])
    return InvertiblePair(TwistedMatrix.from_const(ctx, mat, flavor),
                          TwistedMatrix.from_const(ctx, inv, flavor))


def invert_series_matrix(m: TwistedMatrix, n=None) -> InvertiblePair:
    """Power-series inversion: defined iff the constant term is invertible.

    The inverse is computed degree by degree,
    B_j = rho^j(M_0^-1) * (-(sum_{l<j} rho^l(M_{j-l}) B_l)),
    and both products are re-verified.  A singular constant term is a
    definitive negative for the power-series ring.
    """
    if not m.is_square():
        raise NotInvertibleError("matrix is not square")
    if m.coeffs and m.lower < 0:
        raise FlavorError("power-series inversion needs nonnegative degrees")
    if n is None:
        n = ts.DEFAULT_PRECISION if m.precision == inf else m.precision
    depth = min(n, m.precision)
    ring, rho = m.ctx.ring, m.ctx.rho
    size = m.nrows
    m0 = m.coeffs.get(0)
    if m0 is None:
        raise NotInvertibleError("constant term is zero", witness="M_0 = 0")
    m0_inv = linalg.invert_matrix(ring, [list(r) for r in m0])
    if m0_inv is None:
        raise NotInvertibleError(
            "constant term is singular over the base ring", witness="singular M_0"
        )
    cache = _RhoCache(m.ctx, m.coeffs)
    inv_cache = {0: linalg.freeze(m0_inv)}

    def m0inv_pow(j):
        got = inv_cache.get(j)
        if got is None:
            got = linalg.freeze(linalg.mat_rho(rho, j, m0_inv))
            inv_cache[j] = got
        return got

    bs = {0: linalg.freeze(m0_inv)}
    degs = sorted(d for d in m.coeffs if d > 0)
    for j in range(1, int(depth) if depth != inf else int(n)):
        acc = None
        for d in degs:
            if d > j:
                break
            l = j - d
            bl = bs.get(l)
            if bl is None:
                continue
            term = linalg.mat_mul(ring, cache.get(d, l), bl)
            acc = term if acc is None else linalg.mat_add(ring, acc, term)
        if acc is None:
            continue
        if linalg.mat_is_zero(ring, acc):
            continue
        bs[j] = linalg.freeze(linalg.mat_mul(ring, m0inv_pow(j), linalg.mat_neg(ring, acc)))
    flavor = m.flavor if m.flavor in (SERIES, NOVIKOV) else SERIES
    beta = TwistedMatrix(m.ctx, flavor, size, size, bs, depth, _clip=True)
    return InvertiblePair(m, beta, depth)


# ---------------------------------------------------------------------------
# Witt triangularization with replayable certificates


@dataclass(frozen=True)
class RowOp:
    """row[target] += lam * row[source]; lam has zero constant coefficient."""

    target: int
    source: int
    lam: TwistedSeries


@dataclass(frozen=True)
class TriangularizationCert:
    gamma: TwistedMatrix
    ops: tuple
    diag: tuple  # Witt vectors in row order

    def diag_product(self) -> TwistedSeries:
        out = self.diag[0]
        for w in self.diag[1:]:
            out = out.mul(w)
        return out


def witt_triangularize(b: TwistedMatrix, n=None) -> TriangularizationCert:
    """Reduce B (constant term identity) to upper triangular with Witt diagonal.

    Deterministic: columns left to right, eliminating below-diagonal entries
    with the diagonal pivot, which stays a Witt vector throughout.  Every
    operation matrix is unipotent, so the reduction is torsion-neutral.
    """
    if not b.is_square():
        raise CapabilityError("triangularization needs a square matrix")
    if b.lower != inf and b.lower < 0:
        raise FlavorError("triangularization is defined over the power-series ring")
    if n is None:
        n = ts.DEFAULT_PRECISION if b.precision == inf else b.precision
    depth = min(n, b.precision)
    if depth < 1:
        raise PrecisionError("precision too small to see the constant term")
    size = b.nrows
    ident = linalg.mat_identity(b.ctx.ring, size)
    if b.coeffs.get(0) is None or not linalg.mat_eq(b.ctx.ring, b.coeffs[0], ident):
        raise NotInvertibleError(
            "constant term must be the identity; factor B = B_0 (B_0^-1 B) first",
            witness="B_0 != 1",
        )
    work = [[b.entry(i, j) if b.precision == depth else ts.truncate(b.entry(i, j), depth)
             for j in range(size)] for i in range(size)]
    ops = []
    ring = b.ctx.ring
    for c in range(size):
        pivot = work[c][c]
        pivot_inv = None
        for i in range(c + 1, size):
            e = work[i][c]
            if e.is_zero():
                continue
            if pivot_inv is None:
                pivot_inv = ts.series_invert(pivot, depth)
            lam = e.neg().mul(pivot_inv)
            ops.append(RowOp(i, c, lam))
            for j in range(c, size):
                work[i][j] = work[i][j].add(lam.mul(work[c][j]))
            if not work[i][c].is_zero():
                raise PrecisionError("elimination left a residual below the diagonal")
    diag = tuple(work[c][c] for c in range(size))
    gamma = TwistedMatrix.from_entries(b.ctx, work)
    return TriangularizationCert(gamma, tuple(ops), diag)


def replay_ops(b: TwistedMatrix, ops, n) -> TwistedMatrix:
    """Apply a certificate's row operations to B at precision n."""
    depth = min(n, b.precision)
    size = b.nrows
    work = [[ts.truncate(b.entry(i, j), depth) if b.precision != depth else b.entry(i, j)
             for j in range(size)] for i in range(size)]
    for op in ops:
        lam = op.lam if op.lam.precision <= depth else ts.truncate(op.lam, depth)
        src = list(work[op.source])
        work[op.target] = [work[op.target][j].add(lam.mul(src[j])) for j in range(size)]
    return TwistedMatrix.from_entries(b.ctx, work)


# ---------------------------------------------------------------------------
# relative F-torsion and the standard constant constructions


def relative_f_torsion(m: TwistedMatrix, n=None):
    """(M_0, M_0^-1 M): the torsion of M measured against its augmentation."""
    if m.flavor not in (POLY, SERIES):
        raise FlavorError("relative F-torsion needs the poly or power-series flavor")
    m0 = m.coeffs.get(0)
    if m0 is None:
        raise NotInvertibleError("augmentation is zero", witness="M_0 = 0")
    m0_inv = linalg.invert_matrix(m.ctx.ring, [list(r) for r in m0])
    if m0_inv is None:
        raise NotInvertibleError("augmentation M_0 is singular", witness="singular M_0")
    second = TwistedMatrix.from_const(m.ctx, m0_inv, m.flavor if m.flavor == POLY else SERIES,
                                      inf if m.flavor == POLY else inf)
    second = second.mul(m)
    if n is not None:
        second = second.truncate(min(n, second.precision))
    return linalg.freeze(m0), second


def theta_shift(ctx: TwistCtx, n: int, k: int) -> TwistedMatrix:
    """The map x -> z^k rho^k(x) on row vectors: the matrix z^k * 1_n."""
    if n < 1:
        raise CapabilityError("theta shift needs n >= 1")
    if k == 0:
        return TwistedMatrix.identity(ctx, n, LAURENT)
    return TwistedMatrix.monomial(ctx, k, linalg.mat_identity(ctx.ring, n), LAURENT)


def swap_sign_matrix(ctx: TwistCtx, p: int, q: int) -> TwistedMatrix:
    """Constant block swap M + N -> N + M; its relative F-torsion is trivial."""
    if p < 0 or q < 0:
        raise CapabilityError("block sizes must be nonnegative")
    ring = ctx.ring
    size = p + q
    zero, one_e = ring.zero(), ring.one()
    mat = [[zero] * size for _ in range(size)]
    for i in range(p):
        mat[i][q + i] = one_e
    for j in range(q):
        mat[p + j][j] = one_e
    return TwistedMatrix.from_const(ctx, mat, POLY)


# ---------------------------------------------------------------------------
# determinant oracle (commutative base, identity twist only)


def _require_commutative_untwisted(m: TwistedMatrix):
    if not m.ctx.rho.is_identity:
        raise CapabilityError("determinant oracle requires the identity twist")
    if not m.ctx.ring.is_commutative:
        raise CapabilityError("determinant oracle requires a commutative base ring")


def det_cofactor(m: TwistedMatrix) -> TwistedSeries:
    """Exact cofactor-expansion determinant; desk scale (n <= 6)."""
    _require_commutative_untwisted(m)
    if not m.is_square():
        raise CapabilityError("determinant of a non-square matrix")
    if m.nrows > 6:
        raise CapabilityError("cofactor determinant limited to n <= 6")
    grid = m.entries()

    def det(rows, cols):
        if len(rows) == 1:
            return grid[rows[0]][cols[0]]
        total = None
        r0 = rows[0]
        rest = rows[1:]
        for idx, c in enumerate(cols):
            e = grid[r0][c]
            if e.is_zero() and total is not None:
                continue
            sub = det(rest, cols[:idx] + cols[idx + 1:])
            term = e.mul(sub)
            if idx % 2 == 1:
                term = term.neg()
            total = term if total is None else total.add(term)
        return total

    idx = tuple(range(m.nrows))
    out = det(idx, idx)
    if out is None:
        out = ts.zero(m.ctx, m.flavor, m.precision)
    return out


def det_linear_pencil(ctx: TwistCtx, a, b, z_power: int) -> TwistedSeries:
    """det(A + z^s B) for constant A, B over a commutative field, exactly.

    Evaluation-interpolation in t = z^s: the determinant is a polynomial of
    degree <= size in t, recovered from size+1 evaluations.
    """
    if not ctx.rho.is_identity:
        raise CapabilityError("pencil determinant requires the identity twist")
    fld = ctx.ring.field()
    if fld != ctx.ring:
        raise CapabilityError("pencil determinant requires a field base")
    size = len(a)
    if size == 0:
        return ts.one(ctx, LAURENT)
    npts = size + 1
    if fld.kind == "integers-mod" and npts > fld.m:
        raise CapabilityError("field too small for interpolation")
    points = []
    k = 0
    while len(points) < npts:
        points.append(fld.coeff_from_json(k) if fld.kind == "integers-mod" else _int_elem(fld, k))
        k += 1
    values = []
    for t in points:
        mt = [[fld.add(a[i][j], fld.mul(t, b[i][j])) for j in range(size)] for i in range(size)]
        values.append(linalg.det_const(fld, mt))
    poly = linalg.lagrange_interpolate(fld, points, values)
    coeffs = {d * z_power: c for d, c in enumerate(poly) if not fld.is_zero(c)}
    return ts.from_payload_map(ctx, LAURENT, coeffs)


def _int_elem(fld, k: int):
    out = fld.zero()
    one_e = fld.one()
    for _ in range(k):
        out = fld.add(out, one_e)
    return out
