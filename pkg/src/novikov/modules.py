"""Projective modules, nilpotent pairs, window cokernels, and resolutions.

The central construction: an invertible pair (alpha, beta) over the power
series or Novikov side presents a f.g. projective A-module

    P = coker(alpha~ : z^k R[[z]]^n -> R[[z]]^n)

as the image of an explicit idempotent on the finite degree window
W = sum_{j=-l}^{k-1} z^j A^n, using the retraction built from beta.  Window
elements are held in *plain coordinates*: the coefficient of z^j is
untwisted by rho^{-j}, which makes the A-action standard and every A-linear
map an honest matrix over A.

Semilinear maps are (twist, matrix) pairs acting on rows by
x -> rho^twist(x) * M; composing (s, M) then (t, N) gives (s+t, rho^t(M) N).

The z^{-1}-side cokernels (Laurent P_-, the polynomial-ring pair) are
computed by mirroring z -> z^{-1}, rho -> rho^{-1}, which is a covariant
ring isomorphism, and re-labelling the twist.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf

from . import linalg, series as ts
from .errors import (
    CapabilityError,
    ContextMismatchError,
    InvariantViolationError,
    NotInvertibleError,
    PrecisionError,
)
from .linalg import freeze, mat_identity, mat_mul, mat_rho, vec_mat, vec_rho
from .matrices import InvertiblePair, TwistedMatrix
from .series import LAURENT, POLY, SERIES, TwistCtx


# ---------------------------------------------------------------------------
# row vectors of series


class VecSeries:
    """Row vector of twisted series, stored as degree -> coefficient tuple."""

    __slots__ = ("ctx", "width", "coeffs", "precision")

    def __init__(self, ctx: TwistCtx, width: int, coeffs: dict, precision=inf, _clip=False):
        ring = ctx.ring
        clean = {}
        for d, v in coeffs.items():
            if d >= precision:
                if _clip:
                    continue
                raise PrecisionError("vector coefficient beyond precision")
            if len(v) != width:
                raise ContextMismatchError("vector coefficient width mismatch")
            if any(not ring.is_zero(x) for x in v):
                clean[d] = tuple(v)
        self.ctx = ctx
        self.width = width
        self.coeffs = clean
        self.precision = precision

    @staticmethod
    def zero(ctx, width, precision=inf):
        return VecSeries(ctx, width, {}, precision)

    @staticmethod
    def basis(ctx, width, deg, s, precision=inf):
        ring = ctx.ring
        v = tuple(ring.one() if i == s else ring.zero() for i in range(width))
        return VecSeries(ctx, width, {deg: v}, precision)

    @staticmethod
    def from_plain(ctx, vec, deg=0, precision=inf):
        return VecSeries(ctx, len(vec), {deg: tuple(vec)}, precision)

    @property
    def lower(self):
        return min(self.coeffs) if self.coeffs else inf

    def coeff(self, d):
        if d >= self.precision:
            raise PrecisionError(f"degree {d} beyond vector precision {self.precision}")
        got = self.coeffs.get(d)
        if got is None:
            z = self.ctx.ring.zero()
            return tuple(z for _ in range(self.width))
        return got

    def support(self):
        return sorted(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def add(self, other: "VecSeries"):
        ring = self.ctx.ring
        prec = min(self.precision, other.precision)
        out = dict(self.coeffs)
        for d, v in other.coeffs.items():
            cur = out.get(d)
            out[d] = v if cur is None else tuple(ring.add(a, b) for a, b in zip(cur, v))
        return VecSeries(self.ctx, self.width, out, prec, _clip=True)

    def neg(self):
        ring = self.ctx.ring
        return VecSeries(
            self.ctx, self.width,
            {d: tuple(ring.neg(x) for x in v) for d, v in self.coeffs.items()},
            self.precision,
        )

    def sub(self, other):
        return self.add(other.neg())

    def shift(self, k: int):
        if k == 0:
            return self
        prec = self.precision if self.precision == inf else self.precision + k
        return VecSeries(self.ctx, self.width, {d + k: v for d, v in self.coeffs.items()}, prec)

    def tail_from(self, k: int):
        """Drop all degrees < k (an A-linear truncation, not a module map)."""
        return VecSeries(
            self.ctx, self.width,
            {d: v for d, v in self.coeffs.items() if d >= k}, self.precision,
        )

    def nonneg(self):
        return self.tail_from(0)

    def truncate(self, n):
        if n > self.precision:
            raise PrecisionError("cannot escalate vector precision")
        return VecSeries(
            self.ctx, self.width,
            {d: v for d, v in self.coeffs.items() if d < n}, n,
        )

    def apply_matrix(self, m: TwistedMatrix) -> "VecSeries":
        """x -> x*M with the twisted rule; precision window is exact."""
        if m.ctx != self.ctx or m.nrows != self.width:
            raise ContextMismatchError("vector/matrix mismatch")
        ring, rho = self.ctx.ring, self.ctx.rho
        prec = min(self.precision + m.lower, m.precision + self.lower)
        out = {}
        for d2, mat in m.coeffs.items():
            for d1, v in self.coeffs.items():
                d = d1 + d2
                if d >= prec:
                    continue
                term = vec_mat(ring, vec_rho(rho, d2, v), mat)
                cur = out.get(d)
                out[d] = tuple(term) if cur is None else tuple(
                    ring.add(a, b) for a, b in zip(cur, term)
                )
        return VecSeries(self.ctx, m.ncols, out, prec, _clip=True)

    def __repr__(self):
        return f"<VecSeries w={self.width} {self.coeffs} prec={self.precision}>"


# ---------------------------------------------------------------------------
# projective modules and nilpotent pairs


@dataclass(frozen=True)
class ProjectiveModule:
    """Image of an exact idempotent acting on row vectors x -> x*e."""

    ctx: TwistCtx
    rank: int  # ambient rank
    idem: tuple

    def __post_init__(self):
        if not linalg.is_idempotent(self.ctx.ring, self.idem):
            raise InvariantViolationError("module presentation matrix is not idempotent")

    @staticmethod
    def free(ctx: TwistCtx, n: int):
        return ProjectiveModule(ctx, n, freeze(mat_identity(ctx.ring, n)))

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 or linalg.mat_is_zero(self.ctx.ring, self.idem)

    def flat_rank(self) -> int:
        """Dimension over the terminal field (rank of the flattened idempotent)."""
        if self.rank == 0:
            return 0
        return linalg.rank_rows(self.ctx.ring, [list(r) for r in self.idem])

    def project(self, vec):
        return tuple(vec_mat(self.ctx.ring, vec, self.idem))

    def contains(self, vec) -> bool:
        return tuple(self.project(vec)) == tuple(vec)


@dataclass(frozen=True)
class NilpotentPair:
    """(P, nu): nu is a nilpotent rho^twist-morphism of P, stored ambiently.

    The matrix kills the complement of P (rho^twist(idem)*nu == nu) and its
    image lies in P (nu*idem == nu), so it is literally the "nu + 0" form on
    the ambient free module.
    """

    module: ProjectiveModule
    twist: int
    nu: tuple
    index: int

    @property
    def ctx(self):
        return self.module.ctx

    def nu_vec(self, v):
        """nu applied to a plain row vector."""
        return tuple(vec_mat(self.ctx.ring, vec_rho(self.ctx.rho, self.twist, v), self.nu))

    def nu_pow_vec(self, v, m: int):
        for _ in range(m):
            v = self.nu_vec(v)
        return v

    def nu_power_matrix(self, m: int):
        """Ambient matrix of nu^m (a rho^(m*twist)-morphism)."""
        ring, rho = self.ctx.ring, self.ctx.rho
        if m == 0:
            return freeze(mat_identity(ring, self.module.rank))
        acc = self.nu
        for _ in range(m - 1):
            acc = freeze(mat_mul(ring, mat_rho(rho, self.twist, acc), self.nu))
        return acc


def nilpotent_pair(module: ProjectiveModule, twist: int, nu, bound=None) -> NilpotentPair:
    """Validate and build a nilpotent pair; computes the exact index."""
    if twist not in (1, -1):
        raise CapabilityError("twist must be +1 or -1")
    ring, rho = module.ctx.ring, module.ctx.rho
    nu = freeze(nu)
    r = module.rank
    if len(nu) != r or any(len(row) != r for row in nu):
        raise ContextMismatchError("nu has the wrong ambient shape")
    e = module.idem
    proj_side = freeze(mat_mul(ring, mat_rho(rho, twist, e), nu))
    if proj_side != nu:
        # normalize a raw endomorphism to the ambient "nu + 0" form
        nu = proj_side
    if freeze(mat_mul(ring, nu, e)) != nu:
        raise InvariantViolationError("nu does not map the module into itself")
    if bound is None:
        bound = r * (module.ctx.ring.flat_dim or 1) + 1
    if module.is_zero:
        return NilpotentPair(module, twist, nu, 0)
    power = nu
    index = None
    for m in range(1, bound + 2):
        if linalg.mat_is_zero(ring, power):
            index = m
            break
        power = freeze(mat_mul(ring, mat_rho(rho, twist, power), nu))
    if index is None:
        raise InvariantViolationError(f"endomorphism is not nilpotent within {bound + 1} steps")
    return NilpotentPair(module, twist, nu, index)


def zero_pair(ctx: TwistCtx, twist: int) -> NilpotentPair:
    return NilpotentPair(ProjectiveModule(ctx, 0, ()), twist, (), 0)


def direct_sum_pairs(a: NilpotentPair, b: NilpotentPair) -> NilpotentPair:
    if a.ctx != b.ctx or a.twist != b.twist:
        raise ContextMismatchError("pairs must share context and twist")
    ring = a.ctx.ring
    ra, rb = a.module.rank, b.module.rank
    z = ring.zero()

    def blockdiag(ma, mb):
        out = [[z] * (ra + rb) for _ in range(ra + rb)]
        for i in range(ra):
            for j in range(ra):
                out[i][j] = ma[i][j]
        for i in range(rb):
            for j in range(rb):
                out[ra + i][ra + j] = mb[i][j]
        return freeze(out)

    module = ProjectiveModule(a.ctx, ra + rb, blockdiag(a.module.idem, b.module.idem))
    return nilpotent_pair(module, a.twist, blockdiag(a.nu, b.nu),
                          bound=max(a.index, b.index, 1))


def nil_rank_sequence(pair: NilpotentPair):
    """(rank nu^0, rank nu^1, ..., 0) in terminal-field dimensions.

    Complete similarity invariant over a field with identity twist; a
    capability error otherwise.
    """
    ctx = pair.ctx
    if ctx.ring.flat_dim is None:
        raise CapabilityError("rank sequences need a field-flattenable base ring")
    if not ctx.rho.is_identity:
        raise CapabilityError("rank sequences are defined for the identity twist only")
    if pair.module.rank == 0:
        return (0,)
    seq = [pair.module.flat_rank()]
    if seq[0] == 0:
        return (0,)
    m = 1
    while True:
        r = linalg.rank_rows(ctx.ring, [list(row) for row in pair.nu_power_matrix(m)])
        seq.append(r)
        if r == 0:
            return tuple(seq)
        m += 1
        if m > pair.index + 1:  # pragma: no cover - index bounds the loop
            raise InvariantViolationError("rank sequence failed to terminate")


# ---------------------------------------------------------------------------
# mirroring z <-> z^{-1}


def mirror_ctx(ctx: TwistCtx) -> TwistCtx:
    return TwistCtx(ctx.ring, ctx.rho.inverted())


def mirror_matrix(m: TwistedMatrix) -> TwistedMatrix:
    """Image of M under the ring isomorphism z -> z^{-1}, rho -> rho^{-1}.

    Coefficients are unchanged and degrees are negated; only exact flavors
    can be mirrored (a finite right precision has no mirror image).
    """
    if m.precision != inf:
        raise PrecisionError("only exactly-known matrices can be mirrored")
    out = {-d: mat for d, mat in m.coeffs.items()}
    return TwistedMatrix(mirror_ctx(m.ctx), LAURENT, m.nrows, m.ncols, out)


def mirror_pair(pair: InvertiblePair) -> InvertiblePair:
    return InvertiblePair(mirror_matrix(pair.alpha), mirror_matrix(pair.beta))


# ---------------------------------------------------------------------------
# the window cokernel (z-side)


@dataclass
class WindowData:
    """Everything needed to evaluate the standard resolution maps of P."""

    pair: InvertiblePair
    k: int
    ell: int
    n: int  # matrix size

    @property
    def ctx(self):
        return self.pair.alpha.ctx

    def window_rank(self):
        return self.n * (self.k + self.ell)

    def untwist_window(self, w: VecSeries):
        """Window coefficients of w in plain coordinates."""
        rho = self.ctx.rho
        out = []
        for j in range(-self.ell, self.k):
            out.extend(vec_rho(rho, -j, w.coeff(j)))
        return tuple(out)

    def lift_window(self, plain) -> VecSeries:
        """Laurent-polynomial lift of plain window coordinates."""
        rho = self.ctx.rho
        coeffs = {}
        n = self.n
        for idx, j in enumerate(range(-self.ell, self.k)):
            block = tuple(plain[idx * n: (idx + 1) * n])
            coeffs[j] = vec_rho(rho, j, block)
        return VecSeries(self.ctx, n, coeffs, _clip=True)

    def pi(self, x: VecSeries):
        """Cokernel class of x in plain window coordinates (the p-bar image)."""
        return self.untwist_window(x.apply_matrix(self.pair.beta))

    def sect(self, plain) -> VecSeries:
        """A-linear section of pi: nonnegative part of alpha applied to a lift."""
        return self.lift_window(plain).apply_matrix(self.pair.alpha).nonneg()

    def retr(self, y: VecSeries) -> VecSeries:
        """Retraction of alpha~ (exact preimages on its image)."""
        return y.apply_matrix(self.pair.beta).tail_from(self.k)


def coker_z_side(pair: InvertiblePair, k: int | None = None, ell: int | None = None):
    """Window cokernel of the restriction alpha~: z^k R^n -> R^n.

    Returns (NilpotentPair with twist -1, WindowData).  The idempotent
    identity e*e = e is asserted, as is nilpotency of the z-action within
    k + l steps.  ``ell`` may be enlarged beyond the inverse's lower-degree
    bound; the presented module is the same, which the stabilization check
    exploits.
    """
    alpha, beta = pair.alpha, pair.beta
    n = pair.size
    low_a = alpha.lower
    low_b = beta.lower
    kmin = 0 if low_a == inf else max(0, -low_a)
    if k is None:
        k = kmin
    elif k < kmin:
        raise CapabilityError(f"k={k} is below the minimal window exponent {kmin}")
    ell_min = 0 if low_b == inf else max(0, -low_b)
    if ell is None:
        ell = ell_min
    elif ell < ell_min:
        raise CapabilityError(f"ell={ell} is below the inverse bound {ell_min}")
    ctx = alpha.ctx
    window = WindowData(pair, k, ell, n)
    r = window.window_rank()
    if r == 0:
        return zero_pair(ctx, -1), window
    needed = k + ell
    if pair.verified_to < needed + 1:
        raise PrecisionError(
            f"pair verified to {pair.verified_to}; window needs at least {needed + 1}"
        )
    rows_e = []
    rows_n = []
    for j in range(-ell, k):
        for s in range(n):
            x = VecSeries.basis(ctx, n, j, s)
            y = x.apply_matrix(alpha).nonneg()
            rows_e.append(window.untwist_window(y.apply_matrix(beta)))
            rows_n.append(window.untwist_window(y.shift(1).apply_matrix(beta)))
    idem = freeze(rows_e)
    if not linalg.is_idempotent(ctx.ring, idem):
        raise InvariantViolationError("window retraction did not produce an idempotent")
    module = ProjectiveModule(ctx, r, idem)
    pair_out = nilpotent_pair(module, -1, freeze(rows_n), bound=needed)
    if pair_out.index > needed:
        raise InvariantViolationError(
            f"z-action nilpotency index {pair_out.index} exceeds the k+l bound {needed}"
        )
    return pair_out, window


def _relabel_mirror(pair: NilpotentPair, ctx: TwistCtx) -> NilpotentPair:
    """A mirror-side twist -1 pair is a twist +1 pair over the original ctx."""
    module = ProjectiveModule(ctx, pair.module.rank, pair.module.idem)
    return NilpotentPair(module, +1, pair.nu, pair.index)


def coker_novikov(pair: InvertiblePair, k: int | None = None, n=None):
    """(P, nu) for a Novikov-invertible matrix; nu is the z-action, twist -1."""
    alpha = pair.alpha
    low_a = 0 if alpha.lower == inf else max(0, -alpha.lower)
    low_b = 0 if pair.beta.lower == inf else max(0, -pair.beta.lower)
    need = low_a + low_b + 2 if k is None else max(k, low_a) + low_b + 2
    if n is None:
        n = pair.verified_to
    if n < need:
        raise PrecisionError(f"precision {n} too small; need k+l+2 = {need}")
    if pair.verified_to < need:
        raise PrecisionError(
            f"pair verified only to {pair.verified_to}; need k+l+2 = {need}"
        )
    return coker_z_side(pair, k)


def coker_laurent(pair: InvertiblePair, k_plus: int | None = None,
                  k_minus: int | None = None):
    """Both one-sided cokernel pairs of a Laurent isomorphism:
    (P_+, nu_+) with twist -1 and (P_-, nu_-) with twist +1."""
    if pair.alpha.precision != inf:
        raise PrecisionError("Laurent cokernels need exactly-known matrices")
    plus, window_plus = coker_z_side(pair, k_plus)
    mirrored = mirror_pair(pair)
    minus_m, window_minus = coker_z_side(mirrored, k_minus)
    minus = _relabel_mirror(minus_m, pair.alpha.ctx)
    return (plus, window_plus), (minus, window_minus)


def coker_poly(pair: InvertiblePair, k: int | None = None):
    """Nilpotent pair of a polynomial isomorphism: twist +1 (the z^-1-action
    on the negative-side cokernel)."""
    alpha = pair.alpha
    if alpha.precision != inf or (alpha.coeffs and alpha.lower < 0):
        raise CapabilityError("coker_poly expects an exact polynomial matrix")
    mirrored = mirror_pair(pair)
    kk = None
    if k is not None:
        kk = k
    else:
        kk = max((max(alpha.coeffs) if alpha.coeffs else 0), 0)
    out, window = coker_z_side(mirrored, kk)
    return _relabel_mirror(out, alpha.ctx), window


# ---------------------------------------------------------------------------
# resolutions of P and the comparison machinery


@dataclass(frozen=True)
class InducedEnd:
    """An A-induced module z^offset * X, X presented on an ambient free module."""

    width: int
    idem: tuple | None  # None = free
    offset: int

    def proj(self, ring):
        if self.idem is None:
            return freeze(mat_identity(ring, self.width))
        return self.idem

    def basis_plain(self, ring, i):
        row = [ring.zero()] * self.width
        row[i] = ring.one()
        if self.idem is not None:
            row = vec_mat(ring, row, self.idem)
        return tuple(row)


class Resolution:
    """A length-1 A-induced resolution 0 -> M1 -> M0 -> P -> 0 with a
    section of pi and a retraction of the injection."""

    kind = "abstract"

    def __init__(self, ctx: TwistCtx, m1: InducedEnd, m0: InducedEnd):
        self.ctx = ctx
        self.m1 = m1
        self.m0 = m0

    def d(self, x: VecSeries) -> VecSeries:
        raise NotImplementedError

    def pi(self, x: VecSeries):
        raise NotImplementedError

    def pi_const(self, plain):
        return self.pi(VecSeries.from_plain(self.ctx, plain))

    def sect(self, plain) -> VecSeries:
        raise NotImplementedError

    def retr(self, x: VecSeries) -> VecSeries:
        raise NotImplementedError


class MuResolution(Resolution):
    """0 -> z^k R^n -> R^n -> P -> 0 via the matrix alpha itself."""

    kind = "mu"

    def __init__(self, window: WindowData):
        self.window = window
        n = window.n
        super().__init__(window.ctx, InducedEnd(n, None, window.k), InducedEnd(n, None, 0))

    def d(self, x):
        return x.apply_matrix(self.window.pair.alpha)

    def pi(self, x):
        return self.window.pi(x)

    def sect(self, plain):
        return self.window.sect(plain)

    def retr(self, x):
        return self.window.retr(x)


class ThetaResolution(Resolution):
    """0 -> zP[[z]] -> P[[z]] -> P -> 0 with the direct-sum system sigma/tau."""

    kind = "theta"

    def __init__(self, pair: NilpotentPair):
        if pair.twist != -1:
            raise CapabilityError("theta resolutions live on the z-side (twist -1)")
        self.pair = pair
        r = pair.module.rank
        idem = pair.module.idem if r else ()
        super().__init__(pair.ctx, InducedEnd(r, idem, 1), InducedEnd(r, idem, 0))

    def _nu(self, v):
        return self.pair.nu_vec(v)

    def d(self, x):
        # (z zeta^-1 - nu): coefficient j of the image is x_j (j>=1) - nu(x_{j+1})
        ring = self.ctx.ring
        r = self.pair.module.rank
        prec = x.precision if x.precision == inf else x.precision - 1
        out = {}
        degs = set()
        for d in x.coeffs:
            if d >= 1:
                degs.add(d)
            degs.add(d - 1)
        for j in degs:
            if j < 0 or j >= prec:
                continue
            acc = list(x.coeff(j)) if j >= 1 else [ring.zero()] * r
            if j + 1 < x.precision:
                nv = self._nu(x.coeff(j + 1))
                acc = [ring.sub(a, b) for a, b in zip(acc, nv)]
            out[j] = tuple(acc)
        return VecSeries(self.ctx, r, out, prec, _clip=True)

    def pi(self, x):
        idx = self.pair.index
        ring = self.ctx.ring
        r = self.pair.module.rank
        if x.precision != inf and x.precision < idx:
            raise PrecisionError("series precision below the nilpotency index")
        acc = [ring.zero()] * r
        for j in x.support():
            if j >= idx:
                break
            term = self.pair.nu_pow_vec(x.coeff(j), j)
            acc = [ring.add(a, b) for a, b in zip(acc, term)]
        return tuple(acc)

    def sect(self, plain):
        return VecSeries.from_plain(self.ctx, plain)

    def retr(self, x):
        # tau: degree t >= 1 coefficient is sum_m nu^m(x_{t+m})
        idx = self.pair.index
        ring = self.ctx.ring
        r = self.pair.module.rank
        prec = x.precision if x.precision == inf else x.precision - (idx - 1)
        out = {}
        if x.coeffs:
            top = max(x.coeffs)
            t_hi = top + 1 if prec == inf else min(top + 1, prec)
        else:
            t_hi = 0
        for t in range(1, t_hi):
            acc = [ring.zero()] * r
            touched = False
            for m in range(idx):
                d = t + m
                v = x.coeffs.get(d)
                if v is None:
                    continue
                touched = True
                term = self.pair.nu_pow_vec(v, m)
                acc = [ring.add(a, b) for a, b in zip(acc, term)]
            if touched:
                out[t] = tuple(acc)
        return VecSeries(self.ctx, r, out, prec, _clip=True)


def check_direct_sum_system(theta: ThetaResolution, vectors) -> None:
    """Assert the direct-sum-system identities pi~ o sigma = id, tau o d = id,
    sigma o pi~ + d o tau = id on the given sample vectors."""
    pair = theta.pair
    for plain in _module_points(pair.module):
        if tuple(theta.pi(theta.sect(plain))) != tuple(plain):
            raise InvariantViolationError("pi~ o sigma != id")
    for x in vectors:
        zx = x.tail_from(1)
        lhs = theta.retr(theta.d(zx))
        window = min(lhs.precision, zx.precision)
        if not _vec_agree(lhs, zx, window):
            raise InvariantViolationError("tau o (z zeta^-1 - nu) != id")
        recon = theta.sect(theta.pi(x)).add(theta.d(theta.retr(x)))
        window = min(recon.precision, x.precision)
        if not _vec_agree(recon, x, window):
            raise InvariantViolationError("sigma pi~ + (z zeta^-1 - nu) tau != id")


def _module_points(module: ProjectiveModule):
    for i in range(module.rank):
        yield module.idem[i]


def _vec_agree(a: VecSeries, b: VecSeries, n) -> bool:
    ring = a.ctx.ring
    degs = set(a.coeffs) | set(b.coeffs)
    zero = tuple(ring.zero() for _ in range(a.width))
    for d in degs:
        if d >= n:
            continue
        if a.coeffs.get(d, zero) != b.coeffs.get(d, zero):
            return False
    return True


def build_resolutions(pair: NilpotentPair, window: WindowData):
    """The two standard resolutions of P plus the canonical chain map (f, g)."""
    mu = MuResolution(window)
    theta = ThetaResolution(pair)
    f, g = chain_map(mu, theta)
    return mu, theta, f, g


def chain_map(r1: Resolution, r2: Resolution):
    """Canonical comparison (f, g): R1 -> R2 lifting the identity of P.

    f is the induced extension of c -> sect2(pi1(c)); these compose exactly:
    the comparison R1 -> R3 equals R2->R3 after R1->R2 on the nose because
    pi2 o sect2 = id.
    """

    def f(x: VecSeries) -> VecSeries:
        out = VecSeries.zero(r2.ctx, r2.m0.width, x.precision)
        for d in x.support():
            term = r2.sect(r1.pi_const(x.coeff(d))).shift(d)
            out = out.add(term)
        return out

    def g(x: VecSeries) -> VecSeries:
        return r2.retr(f(r1.d(x)))

    return f, g


class ConeSplit:
    """Splitting of the mapping cone of the comparison R1 -> R2.

    Produces the module isomorphism

        h : (M0(R2) + M1(R1))[[z]]-style -> (M1(R2) + M0(R1))

    via the canonical section s0(c) = (retr2(c - f(sect1(pi2(c)))), sect1(pi2(c))),
    the constant part h0 (an A-module isomorphism) in plain coordinates, and
    the stabilized automorphism u = h0^-1 h with constant term 1.
    """

    def __init__(self, r1: Resolution, r2: Resolution, identity_comparison=False):
        self.r1 = r1
        self.r2 = r2
        if identity_comparison:
            if (r1.m0, r1.m1) != (r2.m0, r2.m1):
                raise CapabilityError("identity comparison needs identical resolutions")
            self.f = lambda x: x
            self.g = lambda x: x
        else:
            self.f, self.g = chain_map(r1, r2)
        self.ctx = r1.ctx
        ring = self.ctx.ring
        self.dom_widths = (r2.m0.width, r1.m1.width)
        self.cod_widths = (r2.m1.width, r1.m0.width)
        self.dom_proj = _block_proj(ring, r2.m0.proj(ring), r1.m1.proj(ring))
        cod_m1_proj = r2.m1.proj(ring)
        cod_m1_plain = freeze(mat_rho(self.ctx.rho, -r2.m1.offset, cod_m1_proj))
        self.cod_proj = _block_proj(ring, cod_m1_plain, r1.m0.proj(ring))
        self._h0 = None
        self._h0_inv = None

    # -- the section and h -------------------------------------------------
    def s0(self, plain):
        """Section of the cone surjection on a constant of M0(R2)."""
        v = self.r1.sect(self.r2.pi_const(plain))
        q = VecSeries.from_plain(self.ctx, plain).sub(self.f(v))
        return self.r2.retr(q), v

    def h(self, w: VecSeries, x: VecSeries):
        """h(w + x) = s(w) + (-g(x), d1(x)); w over M0(R2), x over M1(R1)."""
        u1 = VecSeries.zero(self.ctx, self.cod_widths[0], w.precision)
        u0 = VecSeries.zero(self.ctx, self.cod_widths[1], w.precision)
        for dd in w.support():
            a, b = self.s0(w.coeff(dd))
            u1 = u1.add(a.shift(dd))
            u0 = u0.add(b.shift(dd))
        u1 = u1.add(self.g(x).neg())
        u0 = u0.add(self.r1.d(x))
        return u1, u0

    # -- plain coordinates of the constant part ------------------------------
    def _cod_plain_component(self, u1: VecSeries, u0: VecSeries, m: int):
        o2 = self.r2.m1.offset
        rho = self.ctx.rho
        left = vec_rho(rho, -o2, u1.coeff(m + o2))
        right = u0.coeff(m)
        return tuple(left) + tuple(right)

    def _dom_element(self, plain):
        w2, w1 = self.dom_widths
        rho = self.ctx.rho
        head = tuple(plain[:w2])
        tail = tuple(plain[w2:])
        k1 = self.r1.m1.offset
        w = VecSeries.from_plain(self.ctx, head) if any(
            not self.ctx.ring.is_zero(x) for x in head
        ) else VecSeries.zero(self.ctx, w2)
        x = (
            VecSeries(self.ctx, w1, {k1: vec_rho(rho, k1, tail)})
            if any(not self.ctx.ring.is_zero(x) for x in tail)
            else VecSeries.zero(self.ctx, w1)
        )
        return w, x

    def h0_matrix(self):
        """Plain-coordinate matrix of the constant part h0 (rows = images)."""
        if self._h0 is not None:
            return self._h0
        ring = self.ctx.ring
        size = sum(self.dom_widths)
        rows = []
        for i in range(size):
            basis = [ring.zero()] * size
            basis[i] = ring.one()
            plain = vec_mat(ring, basis, self.dom_proj)
            w, x = self._dom_element(plain)
            u1, u0 = self.h(w, x)
            rows.append(self._cod_plain_component(u1, u0, 0))
        self._h0 = freeze(rows)
        return self._h0

    def h0_inverse(self):
        """Pseudo-inverse of h0 between the two summands (solved exactly)."""
        if self._h0_inv is not None:
            return self._h0_inv
        ring = self.ctx.ring
        h0 = self.h0_matrix()
        size = len(h0)
        comp = [
            [ring.sub(ring.one() if i == j else ring.zero(), self.dom_proj[i][j])
             for j in range(size)]
            for i in range(size)
        ]
        aug = [list(h0[i]) + comp[i] for i in range(size)]
        rows = []
        for j in range(size):
            target = list(self.cod_proj[j]) + [ring.zero()] * size
            sol = linalg.solve_row(ring, aug, target)
            if sol is None:
                raise InvariantViolationError(
                    "h0 is not an isomorphism between the summands"
                )
            rows.append(tuple(sol))
        self._h0_inv = freeze(rows)
        hh = freeze(linalg.mat_mul(ring, h0, self._h0_inv))
        if hh != self.dom_proj:
            raise InvariantViolationError("h0 * h0^-1 != projection")
        hh2 = freeze(linalg.mat_mul(ring, self._h0_inv, h0))
        if hh2 != self.cod_proj:
            raise InvariantViolationError("h0^-1 * h0 != projection")
        return self._h0_inv

    def u_apply(self, w: VecSeries, x: VecSeries):
        """u = h0^-1 o h on a domain element, coefficientwise in the induced grading."""
        u1, u0 = self.h(w, x)
        h0inv = self.h0_inverse()
        ring, rho = self.ctx.ring, self.ctx.rho
        o2 = self.r2.m1.offset
        k1 = self.r1.m1.offset
        w2, w1 = self.dom_widths
        prec = min(
            u1.precision if u1.precision == inf else u1.precision - o2,
            u0.precision,
        )
        degs = set(u0.coeffs) | {d - o2 for d in u1.coeffs}
        out_w = {}
        out_x = {}
        for m in sorted(degs):
            if m < 0 or m >= prec:
                continue
            c = self._cod_plain_component(u1, u0, m)
            row = vec_mat(ring, c, h0inv)
            head, tail = tuple(row[:w2]), tuple(row[w2:])
            if any(not ring.is_zero(v) for v in head):
                out_w[m] = head
            if any(not ring.is_zero(v) for v in tail):
                out_x[m + k1] = vec_rho(rho, k1, tail)
        wprec = prec
        xprec = prec if prec == inf else prec + k1
        return (
            VecSeries(self.ctx, w2, out_w, wprec, _clip=True),
            VecSeries(self.ctx, w1, out_x, xprec, _clip=True),
        )

    def u_matrix(self, n=None) -> TwistedMatrix:
        """Stabilized matrix of u on the ambient free module; constant term 1."""
        ring, rho = self.ctx.ring, self.ctx.rho
        size = sum(self.dom_widths)
        w2 = self.dom_widths[0]
        k1 = self.r1.m1.offset
        prec = inf
        ident = mat_identity(ring, size)
        row_series = []  # per ambient row: degree -> full-width coefficient list
        for i in range(size):
            plain = vec_mat(ring, ident[i], self.dom_proj)
            w, x = self._dom_element(plain)
            uw, ux = self.u_apply(w, x)
            prec = min(prec, uw.precision,
                       ux.precision if ux.precision == inf else ux.precision - k1)
            row = {}
            for d, v in uw.coeffs.items():
                cur = row.setdefault(d, [ring.zero()] * size)
                for j, val in enumerate(v):
                    cur[j] = ring.add(cur[j], val)
            for d, v in ux.coeffs.items():
                pv = vec_rho(rho, -k1, v)
                cur = row.setdefault(d - k1, [ring.zero()] * size)
                for j, val in enumerate(pv):
                    cur[w2 + j] = ring.add(cur[w2 + j], val)
            comp = [ring.sub(a, b) for a, b in zip(ident[i], plain)]
            if any(not ring.is_zero(v) for v in comp):
                cur = row.setdefault(0, [ring.zero()] * size)
                for j, val in enumerate(comp):
                    cur[j] = ring.add(cur[j], val)
            row_series.append(row)
        if n is not None:
            prec = min(prec, n)
        if prec < 1:
            raise PrecisionError("u-matrix precision too small")
        coeffs = {}
        zero = ring.zero()
        for i, row in enumerate(row_series):
            for d, vals in row.items():
                if d >= prec:
                    continue
                mat = coeffs.get(d)
                if mat is None:
                    mat = [[zero] * size for _ in range(size)]
                    coeffs[d] = mat
                mat[i] = vals
        um = TwistedMatrix(self.ctx, SERIES if prec != inf else POLY,
                           size, size, coeffs, prec, _clip=True)
        if not um.is_identity_mod(1):
            raise InvariantViolationError("u does not have constant term 1")
        return um


def split_cone(r1: Resolution, r2: Resolution) -> ConeSplit:
    """Split the comparison cone of two resolutions of the same module.

    The result carries the module isomorphism h (``.h``), its constant part
    h0 as a plain matrix (``.h0_matrix()``), and the stabilized automorphism
    u = h0^-1 h with constant term 1 (``.u_matrix(n)``).  The splitting
    section is the canonical one induced by the target's retraction and the
    source's section, so the construction is deterministic.
    """
    return ConeSplit(r1, r2)


def _block_proj(ring, a, b):
    na, nb = len(a), len(b)
    z = ring.zero()
    out = [[z] * (na + nb) for _ in range(na + nb)]
    for i in range(na):
        for j in range(na):
            out[i][j] = a[i][j]
    for i in range(nb):
        for j in range(nb):
            out[na + i][na + j] = b[i][j]
    return freeze(out)


# ---------------------------------------------------------------------------
# automorphism pairs and phi


@dataclass(frozen=True)
class AutomorphismPair:
    """(P + A^n, phi) with the reference class [A^n, theta_n] recorded.

    phi is a rho-isomorphism stored ambiently: x -> rho(x) * phi, killing the
    complement of the module; phi_inv is the matrix of the inverse
    rho^{-1}-morphism.
    """

    module: ProjectiveModule
    phi: tuple
    phi_inv: tuple
    stab_rank: int

    @property
    def ctx(self):
        return self.module.ctx


def automorphism_pair(module: ProjectiveModule, phi, stab_rank: int) -> AutomorphismPair:
    """Validate phi (x -> rho(x) phi) and solve for the inverse rho^-1-morphism.

    phi^-1(e_j . e) is found by solving w phi = e_j e with w constrained to
    the rowspace of rho(e) (w stands for rho(x), x in the module); the j-th
    row of phi_inv is rho^-1(w).
    """
    ring, rho = module.ctx.ring, module.ctx.rho
    phi = freeze(phi)
    e = module.idem
    size = module.rank
    phi = freeze(linalg.mat_mul(ring, mat_rho(rho, 1, e), phi))
    if freeze(linalg.mat_mul(ring, phi, e)) != phi:
        raise InvariantViolationError("phi does not map the module into itself")
    rho_e = mat_rho(rho, 1, e)
    comp = [
        [ring.sub(ring.one() if i == j else ring.zero(), rho_e[i][j]) for j in range(size)]
        for i in range(size)
    ]
    aug = [list(phi[i]) + comp[i] for i in range(size)]
    rows = []
    for j in range(size):
        target = list(e[j]) + [ring.zero()] * size
        sol = linalg.solve_row(ring, aug, target)
        if sol is None:
            raise NotInvertibleError("phi is not invertible on the module",
                                     witness=f"row {j} unsolvable")
        rows.append(vec_rho(rho, -1, tuple(sol)))
    phi_inv = freeze(rows)
    # composites phi o phi^-1 and phi^-1 o phi must both be the projection
    back = freeze(linalg.mat_mul(ring, mat_rho(rho, 1, phi_inv), phi))
    forth = freeze(linalg.mat_mul(ring, mat_rho(rho, -1, phi), phi_inv))
    if back != freeze(e) or forth != freeze(e):
        raise InvariantViolationError("phi/phi^-1 composite is not the projection")
    return AutomorphismPair(module, phi, phi_inv, stab_rank)


def phi_from_h0(cone: ConeSplit, n: int, k: int) -> AutomorphismPair:
    """The rho-isomorphism (1 + z theta_n)(z^-1 h0)(1 + z^k theta_n^k).

    In plain coordinates this is simply x -> rho(x * H0), so the twisted
    matrix of phi is rho applied entrywise to h0's plain matrix.

    The reference class is (k+1) copies of [A^n, theta_n]: one from the
    theta_n twist in phi and k from the z^-k re-identification of the
    resolved complex C(alpha~) with C(alpha), whose torsion is k tau(z
    theta_n).  This makes j(b1) = rank(P) - nk, matching the z-order of the
    determinant, and is what the round-trip identities require.
    """
    ctx = cone.ctx
    ring, rho = ctx.ring, ctx.rho
    h0 = cone.h0_matrix()
    phi = freeze(mat_rho(rho, 1, h0))
    w2 = cone.dom_widths[0]
    r2m0 = cone.r2.m0
    idem_p = r2m0.proj(ring)
    module = ProjectiveModule(
        ctx, w2 + n, _block_proj(ring, idem_p, mat_identity(ring, n))
    )
    return automorphism_pair(module, phi, n * (k + 1))
