"""Finite groups presented by full multiplication tables.

Desk scale only (|G| <= 24): the table is stored densely and validated at
construction (closure, associativity, unit, inverses).  Elements are referred
to by string names externally and by index internally.
"""

from __future__ import annotations

from .errors import SchemaError

MAX_ORDER = 24


class FiniteGroup:
    """Immutable finite group with elements ``names[0..n-1]``; ``names[unit]`` is 1."""

    __slots__ = ("key", "names", "index", "table", "unit", "inv")

    def __init__(self, key: str, names, table):
        n = len(names)
        if n == 0 or n > MAX_ORDER:
            raise SchemaError(f"group order must be in 1..{MAX_ORDER}, got {n}")
        if len(set(names)) != n:
            raise SchemaError("duplicate group element names")
        self.key = key
        self.names = tuple(names)
        self.index = {g: i for i, g in enumerate(self.names)}
        self.table = tuple(tuple(row) for row in table)
        if len(self.table) != n or any(len(r) != n for r in self.table):
            raise SchemaError("multiplication table must be square of group order")
        for row in self.table:
            for v in row:
                if not (0 <= v < n):
                    raise SchemaError("table entry out of range")
        unit = None
        for e in range(n):
            if all(self.table[e][g] == g and self.table[g][e] == g for g in range(n)):
                unit = e
                break
        if unit is None:
            raise SchemaError("multiplication table has no two-sided unit")
        self.unit = unit
        inv = [None] * n
        for g in range(n):
            for h in range(n):
                if self.table[g][h] == unit and self.table[h][g] == unit:
                    inv[g] = h
                    break
            if inv[g] is None:
                raise SchemaError(f"element {self.names[g]} has no inverse")
        self.inv = tuple(inv)
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                        raise SchemaError("multiplication table is not associative")

    @property
    def order(self) -> int:
        return len(self.names)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.key == other.key and self.table == other.table

    def __hash__(self):
        return hash((self.key, self.table))

    def __repr__(self):
        return f"FiniteGroup({self.key}, order={self.order})"

    def is_automorphism(self, perm) -> bool:
        """Check that the index permutation respects the table and fixes 1."""
        n = self.order
        if sorted(perm) != list(range(n)) or perm[self.unit] != self.unit:
            return False
        return all(
            perm[self.table[a][b]] == self.table[perm[a]][perm[b]]
            for a in range(n)
            for b in range(n)
        )


def cyclic(n: int) -> FiniteGroup:
    """C_n with elements e, g, g2, ..."""
    names = ["e"] + [f"g{i}" if i > 1 else "g" for i in range(1, n)]
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return FiniteGroup(f"cyclic({n})", names, table)


def symmetric3() -> FiniteGroup:
    """S_3 as permutations of {1,2,3}; r = (123), s = (12)."""
    perms = {
        "e": (0, 1, 2),
        "r": (1, 2, 0),
        "r2": (2, 0, 1),
        "s": (1, 0, 2),
        "sr": (0, 2, 1),
        "sr2": (2, 1, 0),
    }
    names = list(perms)
    def compose(p, q):  # apply q first, then p
        return tuple(p[q[i]] for i in range(3))
    lookup = {v: k for k, v in perms.items()}
    idx = {g: i for i, g in enumerate(names)}
    table = [[idx[lookup[compose(perms[a], perms[b])]] for b in names] for a in names]
    return FiniteGroup("s3", names, table)


def klein4() -> FiniteGroup:
    names = ["e", "a", "b", "ab"]
    table = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]
    return FiniteGroup("klein4", names, table)


_BUILTINS = {"s3": symmetric3, "klein4": klein4}


def builtin_group(name: str, order: int | None = None) -> FiniteGroup:
    if name == "cyclic":
        if order is None:
            raise SchemaError("cyclic group requires an order")
        return cyclic(order)
    if name in _BUILTINS:
        return _BUILTINS[name]()
    raise SchemaError(f"unknown builtin group {name!r}")
