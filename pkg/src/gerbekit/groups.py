"""Finite groups as multiplication tables, plus a small catalog."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import permutations, product
from typing import Callable, Hashable, Iterator, Mapping

from ._util import sort

__all__ = [
    "FiniteGroup",
    "trivial_group",
    "cyclic",
    "klein",
    "symmetric3",
    "catalog",
    "homomorphisms",
    "isomorphisms",
]


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    elements: tuple
    mul: Mapping[tuple, Hashable]
    e: Hashable
    inv: Mapping[Hashable, Hashable]
    name: str = ""

    @classmethod
    def from_op(cls, elements, op: Callable, name: str = "") -> "FiniteGroup":
        elements = tuple(elements)
        mul = {(a, b): op(a, b) for a in elements for b in elements}
        e = next(x for x in elements if all(mul[x, y] == y for y in elements))
        inv = {a: next(b for b in elements if mul[a, b] == e) for a in elements}
        return cls(elements, mul, e, inv, name)

    def m(self, a, b):
        return self.mul[a, b]

    def conj(self, k, g):
        return self.mul[self.mul[k, g], self.inv[k]]

    def __len__(self) -> int:
        return len(self.elements)

    @cached_property
    def is_abelian(self) -> bool:
        return all(self.mul[a, b] == self.mul[b, a] for a in self.elements for b in self.elements)

    def element_order(self, a) -> int:
        n, x = 1, a
        while x != self.e:
            x = self.mul[x, a]
            n += 1
        return n

    def closure(self, gens) -> frozenset:
        seen = {self.e}
        frontier = [self.e]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul[x, g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    @cached_property
    def generators(self) -> tuple:
        gens: list = []
        span = frozenset([self.e])
        for a in sorted(self.elements, key=lambda a: (-self.element_order(a), sort([a]))):
            if a not in span:
                gens.append(a)
                span = self.closure(gens)
            if len(span) == len(self.elements):
                break
        return tuple(gens)

    @cached_property
    def center(self) -> tuple:
        return tuple(a for a in self.elements if all(self.mul[a, b] == self.mul[b, a] for b in self.elements))

    def violations(self) -> list:
        out = []
        els = set(self.elements)
        for a in self.elements:
            if self.mul[self.e, a] != a or self.mul[a, self.e] != a:
                out.append(("unit", a))
            if self.mul[a, self.inv[a]] != self.e:
                out.append(("inverse", a))
            for b in self.elements:
                if self.mul[a, b] not in els:
                    out.append(("closure", a, b))
        if out:
            return out
        for a, b, c in product(self.elements, repeat=3):
            if self.mul[self.mul[a, b], c] != self.mul[a, self.mul[b, c]]:
                out.append(("associativity", a, b, c))
                break
        return out


def _indexed(elements, op, name) -> FiniteGroup:
    elements = list(elements)
    index = {x: str(i) for i, x in enumerate(elements)}
    return FiniteGroup.from_op(
        [index[x] for x in elements],
        lambda a, b: index[op(elements[int(a)], elements[int(b)])],
        name,
    )


def trivial_group() -> FiniteGroup:
    return cyclic(1)


def cyclic(n: int) -> FiniteGroup:
    return _indexed(range(n), lambda a, b: (a + b) % n, f"Z{n}")


def klein() -> FiniteGroup:
    return _indexed([(0, 0), (0, 1), (1, 0), (1, 1)], lambda a, b: ((a[0] + b[0]) % 2, (a[1] + b[1]) % 2), "V4")


def symmetric3() -> FiniteGroup:
    perms = sorted(permutations(range(3)))
    return _indexed(perms, lambda p, q: tuple(p[q[i]] for i in range(3)), "S3")


def catalog(max_order: int) -> list[FiniteGroup]:
    """One group per isomorphism class of order at most ``max_order`` (up to 6)."""
    out = [cyclic(1)]
    for n in range(2, max_order + 1):
        if n > 6:
            raise ValueError("catalog only covers orders up to 6")
        out.append(cyclic(n))
        if n == 4:
            out.append(klein())
        if n == 6:
            out.append(symmetric3())
    return out


def homomorphisms(G: FiniteGroup, H: FiniteGroup) -> Iterator[dict]:
    """All homomorphisms G -> H, determined on generators and extended by closure."""
    gens = G.generators
    cands = [[h for h in sort(H.elements) if G.element_order(g) % H.element_order(h) == 0] for g in gens]
    for images in product(*cands):
        f = {G.e: H.e}
        frontier = [G.e]
        ok = True
        while frontier and ok:
            nxt = []
            for x in frontier:
                for g, h in zip(gens, images):
                    y = G.mul[x, g]
                    v = H.mul[f[x], h]
                    if y in f:
                        if f[y] != v:
                            ok = False
                            break
                    else:
                        f[y] = v
                        nxt.append(y)
                if not ok:
                    break
            frontier = nxt
        if ok and all(f[G.mul[a, b]] == H.mul[f[a], f[b]] for a in G.elements for b in G.elements):
            yield f


def isomorphisms(G: FiniteGroup, H: FiniteGroup) -> Iterator[dict]:
    if len(G) != len(H):
        return
    for f in homomorphisms(G, H):
        if len(set(f.values())) == len(H):
            yield f
