"""Finite groups as explicit multiplication tables.

Elements are 0..order-1 with 0 the identity.  table[a][b] is the product ab.
Associativity is checked exhaustively up to order 24 and on deterministic
sampled triples above that.
"""

from dataclasses import dataclass, field as dc_field
from itertools import product

from .errors import ConfigurationError


@dataclass(frozen=True)
class FiniteGroup:
    order: int
    table: tuple
    inverse: tuple = dc_field(default=None)

    def __post_init__(self):
        n = self.order
        if len(self.table) != n or any(len(r) != n for r in self.table):
            raise ConfigurationError("multiplication table has wrong shape")
        for a in range(n):
            if self.table[0][a] != a or self.table[a][0] != a:
                raise ConfigurationError("element 0 must be the identity")
        if self.inverse is None:
            inv = [None] * n
            for a in range(n):
                for b in range(n):
                    if self.table[a][b] == 0 and self.table[b][a] == 0:
                        inv[a] = b
                        break
                if inv[a] is None:
                    raise ConfigurationError(f"element {a} has no inverse")
            object.__setattr__(self, "inverse", tuple(inv))
        else:
            for a in range(n):
                if self.table[a][self.inverse[a]] != 0:
                    raise ConfigurationError("inverse table inconsistent")
        if n <= 24:
            triples = product(range(n), repeat=3)
        else:
            triples = _sampled_triples(n)
        for a, b, c in triples:
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise ConfigurationError(f"table not associative at ({a},{b},{c})")

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self.inverse[a]

    def conj(self, g, a):
        """g a g^{-1}."""
        return self.mul(self.mul(g, a), self.inv(g))

    def element_order(self, a):
        n, x = 1, a
        while x != 0:
            x = self.mul(x, a)
            n += 1
        return n

    def generators(self):
        """Deterministic small generating set (greedy over element indices)."""
        gens = []
        closure = {0}
        for a in range(1, self.order):
            if a in closure:
                continue
            gens.append(a)
            frontier = list(closure | {a})
            closure = set(closure)
            closure.add(a)
            changed = True
            while changed:
                changed = False
                for x in list(closure):
                    for y in list(closure):
                        z = self.mul(x, y)
                        if z not in closure:
                            closure.add(z)
                            changed = True
            if len(closure) == self.order:
                break
        return gens

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


def _sampled_triples(n, count=2000):
    state = 0x9E3779B97F4A7C15
    mask = (1 << 64) - 1
    for _ in range(count):
        state = (state * 6364136223846793005 + 1442695040888963407) & mask
        a = (state >> 16) % n
        b = (state >> 32) % n
        c = (state >> 48) % n
        yield a, b, c


def cyclic(n: int) -> FiniteGroup:
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    return FiniteGroup(order=n, table=table)


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n; element r^a f^b encoded as a + n*b."""
    order = 2 * n

    def mul(x, y):
        a1, b1 = x % n, x // n
        a2, b2 = y % n, y // n
        # (r^a1 f^b1)(r^a2 f^b2) = r^(a1 + (-1)^b1 a2) f^(b1+b2)
        a = (a1 + (a2 if b1 == 0 else -a2)) % n
        return a + n * ((b1 + b2) % 2)

    table = tuple(tuple(mul(x, y) for y in range(order)) for x in range(order))
    return FiniteGroup(order=order, table=table)


def direct_product(g1: FiniteGroup, g2: FiniteGroup) -> FiniteGroup:
    """g1 x g2; element (a, b) encoded as a + g1.order * b."""
    n1, n2 = g1.order, g2.order

    def mul(x, y):
        a1, b1 = x % n1, x // n1
        a2, b2 = y % n1, y // n1
        return g1.mul(a1, a2) + n1 * g2.mul(b1, b2)

    table = tuple(tuple(mul(x, y) for y in range(n1 * n2)) for x in range(n1 * n2))
    return FiniteGroup(order=n1 * n2, table=table)


def from_table(table) -> FiniteGroup:
    return FiniteGroup(order=len(table), table=tuple(tuple(r) for r in table))


def group_from_config(cfg) -> FiniteGroup:
    """Build a group from a scenario-file description."""
    kind = cfg.get("kind")
    if kind == "cyclic":
        return cyclic(int(cfg["n"]))
    if kind == "dihedral":
        return dihedral(int(cfg["n"]))
    if kind == "product":
        return direct_product(group_from_config(cfg["left"]), group_from_config(cfg["right"]))
    if kind == "table":
        return from_table(cfg["table"])
    raise ConfigurationError(f"unknown group kind {kind!r}")
