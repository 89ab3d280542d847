"""Pluggable exact base rings A and ring automorphisms rho.

Elements are plain Python payloads in canonical form, tagged by the explicit
RingCtx that owns them; equality of canonical payloads is structural equality.

    rationals           gmpy2.mpq (reduced, positive denominator)
    integers            int
    integers-mod-m      int in [0, m)
    gaussian-rationals  (mpq, mpq) for a + b*i
    matrix-ring(s,B)    s-tuple of s-tuples of B-payloads
    group-ring(G,B)     |G|-tuple of B-payloads indexed like G.names

No floating point anywhere.  All contexts are immutable and safe to share.
"""

from __future__ import annotations

from gmpy2 import mpq

from .errors import CapabilityError, ContextMismatchError, NotAUnitError, SchemaError
from .groups import FiniteGroup


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    d = 2
    while d * d <= m:
        if m % d == 0:
            return False
        d += 1
    return True


class RingCtx:
    """Base class; concrete contexts implement exact arithmetic on payloads."""

    kind = "abstract"
    #: dimension over the terminal field when field-flattenable, else None
    flat_dim: int | None = None
    is_field = False
    is_commutative = False

    # -- arithmetic ------------------------------------------------------
    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a == self.zero()

    def eq(self, a, b) -> bool:
        return a == b

    # -- units -----------------------------------------------------------
    def invert(self, a):
        raise NotImplementedError

    def is_unit(self, a) -> bool:
        try:
            self.invert(a)
            return True
        except NotAUnitError:
            return False

    # -- flattening to the terminal field --------------------------------
    def field(self) -> "RingCtx":
        """Terminal field this context flattens to; CapabilityError if none."""
        raise CapabilityError(f"{self.kind} is not field-flattenable")

    def coords(self, a) -> list:
        """Coordinates of ``a`` in the chosen field basis (length flat_dim)."""
        raise CapabilityError(f"{self.kind} is not field-flattenable")

    def uncoords(self, cs):
        """Inverse of :meth:`coords`."""
        raise CapabilityError(f"{self.kind} is not field-flattenable")

    def right_rep(self, a):
        """Matrix of x -> x*a on row coordinate vectors over the field."""
        raise CapabilityError(f"{self.kind} is not field-flattenable")

    # -- validation and serialization -------------------------------------
    def validate(self, a):
        """Return ``a`` if it is a canonical payload of this context."""
        raise NotImplementedError

    def coeff_to_json(self, a):
        raise NotImplementedError

    def coeff_from_json(self, obj):
        raise NotImplementedError

    def describe(self) -> dict:
        return {"kind": self.kind}

    def __repr__(self):
        return f"RingCtx({self.describe()})"

    def __eq__(self, other):
        return isinstance(other, RingCtx) and self.describe() == other.describe()

    def __hash__(self):
        return hash(repr(self.describe()))


def _mpq_from_json(obj):
    if isinstance(obj, int):
        return mpq(obj)
    if isinstance(obj, str):
        return mpq(obj)
    raise SchemaError(f"rational expected, got {obj!r}")


class Rationals(RingCtx):
    kind = "rationals"
    flat_dim = 1
    is_field = True
    is_commutative = True

    def zero(self):
        return mpq(0)

    def one(self):
        return mpq(1)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return not a

    def invert(self, a):
        if not a:
            raise NotAUnitError("0 is not a unit", witness="zero")
        return 1 / a

    def field(self):
        return self

    def coords(self, a):
        return [a]

    def uncoords(self, cs):
        return cs[0]

    def right_rep(self, a):
        return [[a]]

    def validate(self, a):
        if not isinstance(a, type(mpq(0))):
            raise ContextMismatchError(f"rationals payload expected, got {type(a).__name__}")
        return a

    def coeff_to_json(self, a):
        return str(a)

    def coeff_from_json(self, obj):
        return _mpq_from_json(obj)


class Integers(RingCtx):
    kind = "integers"
    is_field = False
    is_commutative = True

    def zero(self):
        return 0

    def one(self):
        return 1

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a == 0

    def invert(self, a):
        if a in (1, -1):
            return a
        raise NotAUnitError(f"{a} is not a unit of the integers", witness=a)

    def validate(self, a):
        if not isinstance(a, int) or isinstance(a, bool):
            raise ContextMismatchError("integer payload expected")
        return a

    def coeff_to_json(self, a):
        return a

    def coeff_from_json(self, obj):
        if isinstance(obj, int):
            return obj
        if isinstance(obj, str):
            return int(obj)
        raise SchemaError(f"integer expected, got {obj!r}")


class IntegersMod(RingCtx):
    is_commutative = True

    def __init__(self, m: int):
        if m < 2:
            raise SchemaError("modulus must be >= 2")
        self.m = m
        self.is_field = _is_prime(m)
        self.flat_dim = 1 if self.is_field else None
        self.kind = "integers-mod"

    def zero(self):
        return 0

    def one(self):
        return 1

    def add(self, a, b):
        return (a + b) % self.m

    def neg(self, a):
        return (-a) % self.m

    def sub(self, a, b):
        return (a - b) % self.m

    def mul(self, a, b):
        return (a * b) % self.m

    def is_zero(self, a):
        return a == 0

    def invert(self, a):
        try:
            return pow(a, -1, self.m)
        except ValueError:
            raise NotAUnitError(f"{a} is not a unit mod {self.m}", witness=a) from None

    def field(self):
        if not self.is_field:
            raise CapabilityError(f"Z/{self.m} is not a field (composite modulus)")
        return self

    def coords(self, a):
        return [a]

    def uncoords(self, cs):
        return cs[0]

    def right_rep(self, a):
        return [[a]]

    def validate(self, a):
        if not isinstance(a, int) or isinstance(a, bool) or not 0 <= a < self.m:
            raise ContextMismatchError(f"residue in [0,{self.m}) expected")
        return a

    def coeff_to_json(self, a):
        return a

    def coeff_from_json(self, obj):
        if isinstance(obj, str):
            obj = int(obj)
        if not isinstance(obj, int):
            raise SchemaError(f"residue expected, got {obj!r}")
        return obj % self.m

    def describe(self):
        return {"kind": self.kind, "modulus": self.m}


class GaussianRationals(RingCtx):
    """Q(i) with payloads (a, b) standing for a + b*i."""

    kind = "gaussian-rationals"
    flat_dim = 1
    is_field = True
    is_commutative = True

    def zero(self):
        return (mpq(0), mpq(0))

    def one(self):
        return (mpq(1), mpq(0))

    def i(self):
        return (mpq(0), mpq(1))

    def add(self, a, b):
        return (a[0] + b[0], a[1] + b[1])

    def neg(self, a):
        return (-a[0], -a[1])

    def sub(self, a, b):
        return (a[0] - b[0], a[1] - b[1])

    def mul(self, a, b):
        return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])

    def is_zero(self, a):
        return not a[0] and not a[1]

    def conjugate(self, a):
        return (a[0], -a[1])

    def invert(self, a):
        n = a[0] * a[0] + a[1] * a[1]
        if not n:
            raise NotAUnitError("0 is not a unit", witness="zero")
        return (a[0] / n, -a[1] / n)

    def field(self):
        return self

    def coords(self, a):
        return [a]

    def uncoords(self, cs):
        return cs[0]

    def right_rep(self, a):
        return [[a]]

    def validate(self, a):
        if not (isinstance(a, tuple) and len(a) == 2):
            raise ContextMismatchError("gaussian payload (re, im) expected")
        return a

    def coeff_to_json(self, a):
        return [str(a[0]), str(a[1])]

    def coeff_from_json(self, obj):
        if isinstance(obj, (int, str)):
            return (_mpq_from_json(obj), mpq(0))
        if isinstance(obj, list) and len(obj) == 2:
            return (_mpq_from_json(obj[0]), _mpq_from_json(obj[1]))
        raise SchemaError(f"gaussian coefficient expected, got {obj!r}")


class MatrixRing(RingCtx):
    """s x s matrices over a base context."""

    kind = "matrix-ring"

    def __init__(self, size: int, base: RingCtx):
        if size < 1:
            raise SchemaError("matrix-ring size must be >= 1")
        self.size = size
        self.base = base
        try:
            base_dim = base.flat_dim
        except CapabilityError:  # pragma: no cover - flat_dim is an attribute
            base_dim = None
        self.flat_dim = None if base_dim is None else size * size * base_dim
        # integers embed in Q for inversion purposes only
        self._frac_base = Rationals() if base.kind == "integers" else base
        self._raw_base_ops = base.kind in ("rationals", "integers")
        self.is_commutative = size == 1 and base.is_commutative

    def zero(self):
        z = self.base.zero()
        return tuple(tuple(z for _ in range(self.size)) for _ in range(self.size))

    def one(self):
        z, o = self.base.zero(), self.base.one()
        return tuple(
            tuple(o if i == j else z for j in range(self.size)) for i in range(self.size)
        )

    def unit_elem(self, i, j):
        z, o = self.base.zero(), self.base.one()
        return tuple(
            tuple(o if (p, q) == (i, j) else z for q in range(self.size))
            for p in range(self.size)
        )

    def add(self, a, b):
        if self._raw_base_ops:
            return tuple(
                tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b)
            )
        badd = self.base.add
        return tuple(
            tuple(badd(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b)
        )

    def neg(self, a):
        if self._raw_base_ops:
            return tuple(tuple(-x for x in row) for row in a)
        bneg = self.base.neg
        return tuple(tuple(bneg(x) for x in row) for row in a)

    def mul(self, a, b):
        s = self.size
        if self._raw_base_ops:
            bzero = self.base.zero()
            out = []
            for i in range(s):
                row = []
                ai = a[i]
                for j in range(s):
                    acc = None
                    for k in range(s):
                        x = ai[k]
                        if x:
                            v = x * b[k][j]
                            acc = v if acc is None else acc + v
                    row.append(bzero if acc is None else acc)
                out.append(tuple(row))
            return tuple(out)
        badd, bmul, bzero = self.base.add, self.base.mul, self.base.zero()
        out = []
        for i in range(s):
            row = []
            ai = a[i]
            for j in range(s):
                acc = bzero
                for k in range(s):
                    acc = badd(acc, bmul(ai[k], b[k][j]))
                row.append(acc)
            out.append(tuple(row))
        return tuple(out)

    def is_zero(self, a):
        if self._raw_base_ops:
            return not any(x for row in a for x in row)
        bz = self.base.is_zero
        return all(bz(x) for row in a for x in row)

    def invert(self, a):
        from . import linalg

        if self.base.kind == "integers":
            work = [[mpq(x) for x in row] for row in a]
        else:
            work = [list(r) for r in a]
        inv = linalg.invert_matrix(self._frac_base, work)
        if inv is None:
            raise NotAUnitError("singular matrix", witness="singular pivot column")
        if self.base.kind == "integers":
            rows = []
            for row in inv:
                ints = []
                for x in row:
                    if x.denominator != 1:
                        raise NotAUnitError(
                            "matrix inverse is not integral", witness=str(x)
                        )
                    ints.append(int(x))
                rows.append(tuple(ints))
            return tuple(rows)
        return tuple(tuple(row) for row in inv)

    def field(self):
        return self.base.field()

    def coords(self, a):
        out = []
        for row in a:
            for x in row:
                out.extend(self.base.coords(x))
        return out

    def uncoords(self, cs):
        d = self.base.flat_dim
        s = self.size
        rows = []
        pos = 0
        for _ in range(s):
            row = []
            for _ in range(s):
                row.append(self.base.uncoords(cs[pos : pos + d]))
                pos += d
            rows.append(tuple(row))
        return tuple(rows)

    def right_rep(self, a):
        # x*a for x in M_s(B): block diag over the row index p of the
        # (s*d x s*d) grid [R_B(a[r][q])]_{r,q}
        s, base = self.size, self.base
        d = base.flat_dim
        fzero = base.field().zero()
        grid = [[base.right_rep(a[r][q]) for q in range(s)] for r in range(s)]
        n = s * s * d
        out = [[fzero] * n for _ in range(n)]
        for p in range(s):
            for r in range(s):
                for q in range(s):
                    blk = grid[r][q]
                    for t in range(d):
                        orow = out[(p * s + r) * d + t]
                        ocol = (p * s + q) * d
                        brow = blk[t]
                        for u in range(d):
                            orow[ocol + u] = brow[u]
        return out

    def validate(self, a):
        if not (isinstance(a, tuple) and len(a) == self.size):
            raise ContextMismatchError("matrix payload of wrong shape")
        for row in a:
            if not (isinstance(row, tuple) and len(row) == self.size):
                raise ContextMismatchError("matrix payload of wrong shape")
            for x in row:
                self.base.validate(x)
        return a

    def coeff_to_json(self, a):
        return [[self.base.coeff_to_json(x) for x in row] for row in a]

    def coeff_from_json(self, obj):
        if not (isinstance(obj, list) and len(obj) == self.size):
            raise SchemaError(f"{self.size}x{self.size} matrix expected")
        rows = []
        for row in obj:
            if not (isinstance(row, list) and len(row) == self.size):
                raise SchemaError(f"{self.size}x{self.size} matrix expected")
            rows.append(tuple(self.base.coeff_from_json(x) for x in row))
        return tuple(rows)

    def describe(self):
        return {"kind": self.kind, "size": self.size, "base": self.base.describe()}


class GroupRing(RingCtx):
    """Group ring B[G] with dense coefficient tuples indexed like G.names."""

    kind = "group-ring"

    def __init__(self, group: FiniteGroup, base: RingCtx):
        self.group = group
        self.base = base
        base_dim = base.flat_dim
        self.flat_dim = None if base_dim is None else group.order * base_dim
        self._raw_base = base.kind in ("rationals", "integers")
        self.is_commutative = base.is_commutative and all(
            group.mul(a, b) == group.mul(b, a)
            for a in range(group.order)
            for b in range(group.order)
        )

    def zero(self):
        z = self.base.zero()
        return tuple(z for _ in range(self.group.order))

    def one(self):
        z = self.base.zero()
        return tuple(
            self.base.one() if i == self.group.unit else z
            for i in range(self.group.order)
        )

    def basis_elem(self, g: int):
        z = self.base.zero()
        return tuple(
            self.base.one() if i == g else z for i in range(self.group.order)
        )

    def add(self, a, b):
        if self._raw_base:
            return tuple(x + y for x, y in zip(a, b))
        badd = self.base.add
        return tuple(badd(x, y) for x, y in zip(a, b))

    def neg(self, a):
        if self._raw_base:
            return tuple(-x for x in a)
        bneg = self.base.neg
        return tuple(bneg(x) for x in a)

    def mul(self, a, b):
        n = self.group.order
        table = self.group.table
        if self._raw_base:
            out = [self.base.zero()] * n
            for g in range(n):
                x = a[g]
                if x:
                    tg = table[g]
                    for h in range(n):
                        y = b[h]
                        if y:
                            k = tg[h]
                            out[k] = out[k] + x * y
            return tuple(out)
        badd, bmul, bz = self.base.add, self.base.mul, self.base.is_zero
        out = [self.base.zero()] * n
        for g in range(n):
            x = a[g]
            if bz(x):
                continue
            tg = table[g]
            for h in range(n):
                y = b[h]
                if bz(y):
                    continue
                k = tg[h]
                out[k] = badd(out[k], bmul(x, y))
        return tuple(out)

    def is_zero(self, a):
        if self._raw_base:
            return not any(a)
        bz = self.base.is_zero
        return all(bz(x) for x in a)

    def invert(self, a):
        from . import linalg

        n = self.group.order
        # solve v * a = 1 in coordinates; right_rep is the system matrix
        try:
            fld = self.field()
        except CapabilityError:
            raise CapabilityError(
                "group-ring inversion requires a field-flattenable base"
            ) from None
        rep = self.right_rep(a)
        rhs = self.coords(self.one())
        sol = linalg.solve_row_system(fld, rep, rhs)
        if sol is None:
            raise NotAUnitError(
                "group-ring element is a zero divisor or non-unit",
                witness="regular-representation system unsolvable",
            )
        v = self.uncoords(sol)
        if self.mul(a, v) != self.one():  # pragma: no cover - f.d. algebra
            raise NotAUnitError("one-sided inverse only", witness="asymmetric")
        return v

    def field(self):
        return self.base.field()

    def coords(self, a):
        out = []
        for x in a:
            out.extend(self.base.coords(x))
        return out

    def uncoords(self, cs):
        d = self.base.flat_dim
        return tuple(
            self.base.uncoords(cs[i * d : (i + 1) * d]) for i in range(self.group.order)
        )

    def right_rep(self, a):
        # (x*a) coefficient at h is sum_g x_g a_{g^{-1} h}
        n = self.group.order
        base, grp = self.base, self.group
        d = base.flat_dim
        fzero = base.field().zero()
        out = [[fzero] * (n * d) for _ in range(n * d)]
        for g in range(n):
            ginv = grp.inv[g]
            for h in range(n):
                blk = base.right_rep(a[grp.mul(ginv, h)])
                for t in range(d):
                    orow = out[g * d + t]
                    for u in range(d):
                        orow[h * d + u] = blk[t][u]
        return out

    def validate(self, a):
        if not (isinstance(a, tuple) and len(a) == self.group.order):
            raise ContextMismatchError("group-ring payload of wrong length")
        for x in a:
            self.base.validate(x)
        return a

    def coeff_to_json(self, a):
        out = {}
        for i, x in enumerate(a):
            if not self.base.is_zero(x):
                out[self.group.names[i]] = self.base.coeff_to_json(x)
        return out

    def coeff_from_json(self, obj):
        if not isinstance(obj, dict):
            raise SchemaError("group-ring coefficient must map element names to values")
        coeffs = [self.base.zero()] * self.group.order
        for name, val in obj.items():
            if name not in self.group.index:
                raise SchemaError(f"unknown group element {name!r}")
            coeffs[self.group.index[name]] = self.base.coeff_from_json(val)
        return tuple(coeffs)

    def describe(self):
        return {
            "kind": self.kind,
            "group": {"key": self.group.key, "elements": list(self.group.names)},
            "base": self.base.describe(),
        }


# ---------------------------------------------------------------------------
# automorphisms


class Automorphism:
    """Ring automorphism rho with an explicit inverse descriptor.

    Integer powers rho^k are cheap: descriptors compose by bookkeeping, not
    by symbolic inversion.
    """

    def __init__(self, ctx: RingCtx, kind: str, unit=None, perm=None):
        self.ctx = ctx
        self.kind = kind
        self.is_identity = kind == "identity"
        self.period = 1 if self.is_identity else None
        if kind == "identity":
            pass
        elif kind == "complex-conjugation":
            if ctx.kind != "gaussian-rationals":
                raise SchemaError("complex-conjugation needs gaussian-rationals")
            self.period = 2
        elif kind == "conjugation-by-unit":
            self.unit = ctx.validate(unit)
            self.unit_inv = ctx.invert(unit)
            self._upow = {0: ctx.one(), 1: self.unit, -1: self.unit_inv}
            # small conjugation periods (u^m central) make rho^k cheap
            power = self.unit
            for m in range(2, 13):
                power = ctx.mul(power, self.unit)
                if ctx.eq(power, ctx.one()):
                    self.period = m
                    break
        elif kind == "group-automorphism":
            if ctx.kind != "group-ring":
                raise SchemaError("group-automorphism needs a group-ring context")
            perm = tuple(perm)
            if not ctx.group.is_automorphism(perm):
                raise SchemaError("permutation does not respect the multiplication table")
            self.perm = perm
            inv = [0] * len(perm)
            for i, p in enumerate(perm):
                inv[p] = i
            self.perm_inv = tuple(inv)
            self._ppow = {0: tuple(range(len(perm))), 1: perm, -1: self.perm_inv}
            ident = tuple(range(len(perm)))
            power = perm
            for m in range(1, len(perm) * len(perm) + 2):
                if power == ident:
                    self.period = m
                    break
                power = tuple(perm[power[i]] for i in range(len(perm)))
        else:
            raise SchemaError(f"unknown automorphism kind {kind!r}")

    def _unit_power(self, k: int):
        cache = self._upow
        if k in cache:
            return cache[k]
        step, base = (1, self.unit) if k > 0 else (-1, self.unit_inv)
        j = step
        while True:
            if k == j:
                break
            if j not in cache:
                cache[j] = self.ctx.mul(cache[j - step], base)
            j += step
        cache[k] = self.ctx.mul(cache[k - step], base)
        return cache[k]

    def _perm_power(self, k: int):
        cache = self._ppow
        if k in cache:
            return cache[k]
        step = 1 if k > 0 else -1
        base = self.perm if k > 0 else self.perm_inv
        j = step
        while j != k + step:
            if j not in cache:
                prev = cache[j - step]
                cache[j] = tuple(base[prev[i]] for i in range(len(base)))
            j += step
        return cache[k]

    def apply(self, a, k: int = 1):
        """rho^k(a); k may be negative."""
        if self.is_identity:
            return a
        if self.period is not None:
            k %= self.period
        if k == 0:
            return a
        if self.kind == "complex-conjugation":
            return (a[0], -a[1])
        if self.kind == "conjugation-by-unit":
            u, v = self._unit_power(k), self._unit_power(-k)
            return self.ctx.mul(u, self.ctx.mul(a, v))
        # group-automorphism: permute coefficients, rho(sum a_g g) = sum a_g rho(g)
        p = self._perm_power(k)
        out = [self.ctx.base.zero()] * len(p)
        for i, x in enumerate(a):
            out[p[i]] = x
        return tuple(out)

    def inverted(self) -> "Automorphism":
        """Descriptor of rho^-1 (cheap; no symbolic inversion)."""
        if self.kind in ("identity", "complex-conjugation"):
            return self
        if self.kind == "conjugation-by-unit":
            return Automorphism(self.ctx, self.kind, unit=self.unit_inv)
        return Automorphism(self.ctx, self.kind, perm=self.perm_inv)

    def describe(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "conjugation-by-unit":
            d["unit"] = self.ctx.coeff_to_json(self.unit)
        elif self.kind == "group-automorphism":
            names = self.ctx.group.names
            d["images"] = {names[i]: names[p] for i, p in enumerate(self.perm)}
        return d

    def __eq__(self, other):
        return isinstance(other, Automorphism) and self.describe() == other.describe()

    def __hash__(self):
        return hash(repr(self.describe()))

    def __repr__(self):
        return f"Automorphism({self.describe()})"


def identity_auto(ctx: RingCtx) -> Automorphism:
    return Automorphism(ctx, "identity")


# ---------------------------------------------------------------------------
# operation wrappers


def ring_arith(ctx: RingCtx, op: str, a, b=None):
    """Dispatch {add,neg,mul,one,zero,eq} with payload validation."""
    if op == "one":
        return ctx.one()
    if op == "zero":
        return ctx.zero()
    ctx.validate(a)
    if op == "neg":
        return ctx.neg(a)
    ctx.validate(b)
    if op == "add":
        return ctx.add(a, b)
    if op == "mul":
        return ctx.mul(a, b)
    if op == "eq":
        return ctx.eq(a, b)
    raise SchemaError(f"unknown ring operation {op!r}")


def is_unit(ctx: RingCtx, a) -> bool:
    return ctx.is_unit(ctx.validate(a))


def invert_elem(ctx: RingCtx, a):
    return ctx.invert(ctx.validate(a))


def apply_rho(rho: Automorphism, k: int, a):
    return rho.apply(rho.ctx.validate(a), k)


def solve_right_linear(ctx: RingCtx, rows, rhs):
    """Solve x * M = b over a field-flattenable context; None if unsolvable."""
    from . import linalg

    if ctx.flat_dim is None:
        raise CapabilityError(f"solving is not supported over {ctx.kind}")
    ctx.field()  # raises CapabilityError for composite moduli
    return linalg.solve_row(ctx, rows, rhs)


def ring_from_json(obj) -> RingCtx:
    """Build a RingCtx from its JSON descriptor (the problem-file encoding)."""
    from .groups import FiniteGroup, builtin_group

    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError("ring descriptor must be an object with a 'kind'")
    kind = obj["kind"]
    if kind == "rationals":
        return Rationals()
    if kind == "integers":
        return Integers()
    if kind in ("integers-mod", "integers-mod-m"):
        if "modulus" not in obj:
            raise SchemaError("integers-mod requires 'modulus'")
        return IntegersMod(int(obj["modulus"]))
    if kind == "gaussian-rationals":
        return GaussianRationals()
    if kind == "matrix-ring":
        return MatrixRing(int(obj.get("size", 0)), ring_from_json(obj.get("base")))
    if kind == "group-ring":
        g = obj.get("group")
        if not isinstance(g, dict):
            raise SchemaError("group-ring requires a 'group' descriptor")
        if "name" in g:
            grp = builtin_group(g["name"], g.get("order"))
        elif "elements" in g and "table" in g:
            names = list(g["elements"])
            index = {n: i for i, n in enumerate(names)}
            try:
                table = [[index[v] for v in row] for row in g["table"]]
            except KeyError as exc:
                raise SchemaError(f"unknown element {exc} in table") from None
            grp = FiniteGroup(g.get("key", "custom"), names, table)
        else:
            raise SchemaError("group descriptor needs 'name' or 'elements'+'table'")
        return GroupRing(grp, ring_from_json(obj.get("base")))
    raise SchemaError(f"unknown ring kind {kind!r}")


def auto_from_json(ctx: RingCtx, obj) -> Automorphism:
    if obj is None:
        return identity_auto(ctx)
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError("automorphism descriptor must be an object with a 'kind'")
    kind = obj["kind"]
    if kind == "identity":
        return identity_auto(ctx)
    if kind == "complex-conjugation":
        return Automorphism(ctx, kind)
    if kind == "conjugation-by-unit":
        if "unit" not in obj:
            raise SchemaError("conjugation-by-unit requires 'unit'")
        return Automorphism(ctx, kind, unit=ctx.coeff_from_json(obj["unit"]))
    if kind == "group-automorphism":
        if ctx.kind != "group-ring":
            raise SchemaError("group-automorphism needs a group-ring context")
        images = obj.get("images")
        if not isinstance(images, dict):
            raise SchemaError("group-automorphism requires 'images'")
        perm = [None] * ctx.group.order
        for src, dst in images.items():
            if src not in ctx.group.index or dst not in ctx.group.index:
                raise SchemaError(f"unknown group element in images: {src}->{dst}")
            perm[ctx.group.index[src]] = ctx.group.index[dst]
        if any(p is None for p in perm):
            raise SchemaError("images must cover every group element")
        return Automorphism(ctx, kind, perm=perm)
    raise SchemaError(f"unknown automorphism kind {kind!r}")
