"""Presheaves of strict 2-groupoids, their path-component groupoids and homotopy sheaves."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Mapping, NamedTuple

from ._util import UnionFind, Verdict, sort
from .groups import FiniteGroup
from .gpd import (
    GFunctor,
    Groupoid,
    GroupoidMap,
    GroupoidPresheaf,
    GroupPresheaf,
    aut_map,
    is_cech,
    pi0,
    pi0_map,
)
from .presheaf import PresheafMap, SetPresheaf, is_local_iso, sheafify
from .site import FiniteSite, slice_site

__all__ = [
    "TwoGroupoid",
    "TwoFunctor",
    "TwoGroupoidPresheaf",
    "TwoMap",
    "TwoGroupoidError",
    "resolution",
    "resolution_map",
    "discrete_two",
    "crossed_module",
    "constant_two_presheaf",
    "interval_product",
    "interval_legs",
    "pi_groupoid",
    "hom_groupoid_presheaf",
    "pi2_presheaf",
    "homotopy_sheaves",
    "is_lwe2",
    "to_point",
    "to_pi0",
    "LemmaCheck",
    "check_lemma6",
    "check_lemma8",
    "compose_two_maps",
    "identity_two_map",
]


class TwoGroupoidError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TwoGroupoid:
    """Strict 2-groupoid.

    ``one_cells`` maps a 1-cell id to ``(source, target)`` objects and
    ``two_cells`` maps a 2-cell id to ``(source, target)`` 1-cells. The
    operations are callables so large families (atlases) need no tables.
    ``vcomp(b, a)`` is b after a; ``hcomp(b, a)`` has a on the right.
    """

    objects: tuple
    one_cells: Mapping[Hashable, tuple]
    two_cells: Mapping[Hashable, tuple]
    comp1: Callable
    ident1: Callable
    inv1: Callable
    vcomp: Callable
    ident2: Callable
    vinv: Callable
    hcomp: Callable
    name: str = field(default="", compare=False)

    @classmethod
    def from_tables(cls, objects, one_cells, two_cells, comp1, ident1, inv1, vcomp, ident2, vinv, hcomp, name=""):
        """Build from dict tables keyed as in the callables."""
        return cls(
            tuple(objects), dict(one_cells), dict(two_cells),
            lambda g, f: comp1[g, f], ident1.__getitem__, inv1.__getitem__,
            lambda b, a: vcomp[b, a], ident2.__getitem__, vinv.__getitem__,
            lambda b, a: hcomp[b, a], name,
        )

    def s1(self, f):
        return self.one_cells[f][0]

    def t1(self, f):
        return self.one_cells[f][1]

    def s2(self, a):
        return self.two_cells[a][0]

    def t2(self, a):
        return self.two_cells[a][1]

    @cached_property
    def _hom1(self) -> dict:
        out: dict = {}
        for f in sort(self.one_cells):
            out.setdefault(self.one_cells[f], []).append(f)
        return {k: tuple(v) for k, v in out.items()}

    def hom(self, x, y) -> tuple:
        return self._hom1.get((x, y), ())

    @cached_property
    def _from2(self) -> dict:
        out: dict = {f: [] for f in self.one_cells}
        for a in sort(self.two_cells):
            out[self.s2(a)].append(a)
        return {k: tuple(v) for k, v in out.items()}

    def two_from(self, f) -> tuple:
        return self._from2.get(f, ())

    def two_between(self, f, g) -> tuple:
        return tuple(a for a in self.two_from(f) if self.t2(a) == g)

    def hom_groupoid(self, x, y) -> Groupoid:
        """The groupoid of 1-cells x -> y and the 2-cells between them."""
        objs = self.hom(x, y)
        arrows = {a: self.two_cells[a] for f in objs for a in self.two_from(f)}
        comp = {}
        for a in arrows:
            for b in self.two_from(self.t2(a)):
                comp[b, a] = self.vcomp(b, a)
        return Groupoid(objs, arrows, comp, {f: self.ident2(f) for f in objs}, {a: self.vinv(a) for a in arrows})

    def one_groupoid(self) -> Groupoid:
        """The underlying 1-groupoid."""
        comp = {}
        for f in self.one_cells:
            for g in sort(self.one_cells):
                if self.s1(g) == self.t1(f):
                    comp[g, f] = self.comp1(g, f)
        return Groupoid(self.objects, dict(self.one_cells), comp, {x: self.ident1(x) for x in self.objects},
                        {f: self.inv1(f) for f in self.one_cells})

    def violations(self, limit: int = 200000) -> list:
        """Axiom failures with witnesses; interchange is checked on at most ``limit`` quadruples."""
        out = []
        objs = set(self.objects)
        for f, (x, y) in self.one_cells.items():
            if x not in objs or y not in objs:
                out.append(("one-cell-endpoints", f))
        for a, (f, g) in self.two_cells.items():
            if self.one_cells.get(f) is None or self.one_cells.get(f) != self.one_cells.get(g):
                out.append(("two-cell-parallel", a))
        if out:
            return out
        one = self.one_groupoid()
        out += [("one",) + v for v in one.violations()]
        if out:
            return out
        for x in self.objects:
            for y in self.objects:
                out += [("hom", x, y) + v for v in self.hom_groupoid(x, y).violations()]
        if out:
            return out
        for a, (f, f2) in self.two_cells.items():
            x, y = self.one_cells[f]
            for g in self.one_cells:
                if self.s1(g) != y:
                    continue
                for b in self.two_from(g):
                    ba = self.hcomp(b, a)
                    if self.two_cells.get(ba) != (self.comp1(g, f), self.comp1(self.t2(b), f2)):
                        out.append(("hcomp-type", b, a))
        if out:
            return out
        for f in self.one_cells:
            x, y = self.one_cells[f]
            for g in self.one_cells:
                if self.s1(g) == y and self.hcomp(self.ident2(g), self.ident2(f)) != self.ident2(self.comp1(g, f)):
                    out.append(("hcomp-identity", g, f))
        if out:
            return out
        for a in self.two_cells:
            x, y = self.one_cells[self.s2(a)]
            if self.hcomp(self.ident2(self.ident1(y)), a) != a or self.hcomp(a, self.ident2(self.ident1(x))) != a:
                out.append(("hcomp-unit", a))
        if out:
            return out
        budget = limit
        for a in sort(self.two_cells):
            y = self.t1(self.s2(a))
            for a2 in self.two_from(self.t2(a)):
                for g in self.one_cells:
                    if self.s1(g) != y:
                        continue
                    for b in self.two_from(g):
                        for b2 in self.two_from(self.t2(b)):
                            budget -= 1
                            if budget < 0:
                                return out
                            lhs = self.hcomp(self.vcomp(b2, b), self.vcomp(a2, a))
                            rhs = self.vcomp(self.hcomp(b2, a2), self.hcomp(b, a))
                            if lhs != rhs:
                                out.append(("interchange", b2, b, a2, a))
                                return out
        for a in sort(self.two_cells):
            y = self.t1(self.s2(a))
            for g in self.one_cells:
                if self.s1(g) != y:
                    continue
                for b in self.two_from(g):
                    z = self.t1(g)
                    for h in self.one_cells:
                        if self.s1(h) != z:
                            continue
                        for c in self.two_from(h)[:2]:
                            budget -= 1
                            if budget < 0:
                                return out
                            if self.hcomp(self.hcomp(c, b), a) != self.hcomp(c, self.hcomp(b, a)):
                                out.append(("hcomp-associativity", c, b, a))
                                return out
        return out


class TwoFunctor(NamedTuple):
    obj: Mapping
    one: Mapping
    two: Mapping


def two_functor_violations(F: TwoFunctor, A: TwoGroupoid, B: TwoGroupoid) -> list:
    out = []
    for x in A.objects:
        if F.obj.get(x) not in set(B.objects):
            out.append(("object", x))
        elif F.one.get(A.ident1(x)) != B.ident1(F.obj[x]):
            out.append(("identity", x))
    if out:
        return out
    for f, (x, y) in A.one_cells.items():
        if B.one_cells.get(F.one.get(f)) != (F.obj[x], F.obj[y]):
            out.append(("one-cell", f))
    if out:
        return out
    for a, (f, g) in A.two_cells.items():
        if B.two_cells.get(F.two.get(a)) != (F.one[f], F.one[g]):
            out.append(("two-cell", a))
    if out:
        return out
    for f in sort(A.one_cells):
        if F.two[A.ident2(f)] != B.ident2(F.one[f]):
            out.append(("two-identity", f))
        for g in A.one_cells:
            if A.s1(g) == A.t1(f) and F.one[A.comp1(g, f)] != B.comp1(F.one[g], F.one[f]):
                out.append(("comp1", g, f))
    if out:
        return out
    for a in sort(A.two_cells):
        for b in A.two_from(A.t2(a)):
            if F.two[A.vcomp(b, a)] != B.vcomp(F.two[b], F.two[a]):
                out.append(("vcomp", b, a))
        y = A.t1(A.s2(a))
        for g in A.one_cells:
            if A.s1(g) != y:
                continue
            for b in A.two_from(g):
                if F.two[A.hcomp(b, a)] != B.hcomp(F.two[b], F.two[a]):
                    out.append(("hcomp", b, a))
                    return out
    return out


@dataclass(frozen=True, eq=False)
class TwoGroupoidPresheaf:
    site: FiniteSite
    sections: Mapping[str, TwoGroupoid]
    restrict: Mapping[str, TwoFunctor]

    def r_obj(self, phi, x):
        return self.restrict[phi].obj[x]

    def r_one(self, phi, f):
        return self.restrict[phi].one[f]

    def r_two(self, phi, a):
        return self.restrict[phi].two[a]

    def violations(self, limit: int = 200000) -> list:
        cat = self.site.category
        out = []
        for U in cat.objects:
            out += [("section", U) + v for v in self.sections[U].violations(limit)]
        if out:
            return out
        for f, (V, U) in cat.morphisms.items():
            out += [("restriction", f) + v
                    for v in two_functor_violations(self.restrict[f], self.sections[U], self.sections[V])]
        if out:
            return out
        for f in sort(cat.morphisms):
            U = cat.tgt(f)
            S = self.sections[U]
            for g in cat.into(cat.src(f)):
                fg = cat.comp(f, g)
                rf, rg, rfg = self.restrict[f], self.restrict[g], self.restrict[fg]
                if any(rfg.obj[x] != rg.obj[rf.obj[x]] for x in S.objects) or \
                        any(rfg.one[c] != rg.one[rf.one[c]] for c in S.one_cells) or \
                        any(rfg.two[c] != rg.two[rf.two[c]] for c in S.two_cells):
                    out.append(("functoriality", f, g))
            ident = self.restrict[cat.identities[U]]
            if any(ident.obj[x] != x for x in S.objects) or any(ident.one[c] != c for c in S.one_cells) or \
                    any(ident.two[c] != c for c in S.two_cells):
                out.append(("identity", U))
        return out

    @cached_property
    def ob(self) -> SetPresheaf:
        return SetPresheaf(self.site, {U: tuple(sort(S.objects)) for U, S in self.sections.items()},
                           {f: F.obj for f, F in self.restrict.items()})

    def global_objects(self) -> list[dict]:
        from itertools import product

        cat = self.site.category
        objs = list(cat.objects)
        out = []
        for choice in product(*(sort(self.sections[U].objects) for U in objs)):
            sel = dict(zip(objs, choice))
            if all(self.r_obj(f, sel[U]) == sel[V] for f, (V, U) in cat.morphisms.items()):
                out.append(sel)
        return out


@dataclass(frozen=True, eq=False)
class TwoMap:
    source: TwoGroupoidPresheaf
    target: TwoGroupoidPresheaf
    obj: Mapping[str, Mapping]
    one: Mapping[str, Mapping]
    two: Mapping[str, Mapping]

    def at(self, U) -> TwoFunctor:
        return TwoFunctor(self.obj[U], self.one[U], self.two[U])

    def violations(self) -> list:
        A, B = self.source, self.target
        cat = A.site.category
        out = []
        for U in cat.objects:
            out += [(U,) + v for v in two_functor_violations(self.at(U), A.sections[U], B.sections[U])]
        if out:
            return out
        for f, (V, U) in cat.morphisms.items():
            S = A.sections[U]
            for x in S.objects:
                if self.obj[V][A.r_obj(f, x)] != B.r_obj(f, self.obj[U][x]):
                    out.append(("naturality-object", f, x))
            for c in S.one_cells:
                if self.one[V][A.r_one(f, c)] != B.r_one(f, self.one[U][c]):
                    out.append(("naturality-one", f, c))
            for c in S.two_cells:
                if self.two[V][A.r_two(f, c)] != B.r_two(f, self.two[U][c]):
                    out.append(("naturality-two", f, c))
        return out


def identity_two_map(H: TwoGroupoidPresheaf) -> TwoMap:
    secs = H.sections
    return TwoMap(H, H, {U: {x: x for x in S.objects} for U, S in secs.items()},
                  {U: {c: c for c in S.one_cells} for U, S in secs.items()},
                  {U: {c: c for c in S.two_cells} for U, S in secs.items()})


def compose_two_maps(g: TwoMap, f: TwoMap) -> TwoMap:
    return TwoMap(
        f.source, g.target,
        {U: {x: g.obj[U][y] for x, y in f.obj[U].items()} for U in f.obj},
        {U: {c: g.one[U][d] for c, d in f.one[U].items()} for U in f.one},
        {U: {c: g.two[U][d] for c, d in f.two[U].items()} for U in f.two},
    )


# ---------------------------------------------------------------- constructions


def _resolution_section(S: Groupoid) -> TwoGroupoid:
    two = {(f, g): (f, g) for (x, y), fs in S._homs.items() for f in fs for g in fs}
    return TwoGroupoid(
        S.objects, dict(S.arrows), two,
        lambda g, f: S.comp[g, f], S.ident.__getitem__, S.inv.__getitem__,
        lambda b, a: (a[0], b[1]), lambda f: (f, f), lambda a: (a[1], a[0]),
        lambda b, a: (S.comp[b[0], a[0]], S.comp[b[1], a[1]]),
    )


def resolution(G: GroupoidPresheaf) -> TwoGroupoidPresheaf:
    """Same objects and 1-cells as G, a unique 2-cell ``(f, g)`` from f to each parallel g."""
    sections = {U: _resolution_section(S) for U, S in G.sections.items()}
    restrict = {}
    for phi, F in G.restrict.items():
        src = sections[G.site.category.tgt(phi)]
        restrict[phi] = TwoFunctor(dict(F.obj), dict(F.arr), {(f, g): (F.arr[f], F.arr[g]) for (f, g) in src.two_cells})
    return TwoGroupoidPresheaf(G.site, sections, restrict)


def resolution_map(f: GroupoidMap, source: TwoGroupoidPresheaf = None, target: TwoGroupoidPresheaf = None) -> TwoMap:
    A = source or resolution(f.source)
    B = target or resolution(f.target)
    two = {U: {(a, b): (f.arr[U][a], f.arr[U][b]) for (a, b) in A.sections[U].two_cells} for U in A.sections}
    return TwoMap(A, B, {U: dict(m) for U, m in f.obj.items()}, {U: dict(m) for U, m in f.arr.items()}, two)


def _discrete_section(S: Groupoid) -> TwoGroupoid:
    two = {(f, f): (f, f) for f in S.arrows}
    return TwoGroupoid(
        S.objects, dict(S.arrows), two,
        lambda g, f: S.comp[g, f], S.ident.__getitem__, S.inv.__getitem__,
        lambda b, a: a, lambda f: (f, f), lambda a: a,
        lambda b, a: (S.comp[b[0], a[0]],) * 2,
    )


def discrete_two(G: GroupoidPresheaf) -> TwoGroupoidPresheaf:
    """G as a presheaf of 2-groupoids with identity 2-cells only."""
    sections = {U: _discrete_section(S) for U, S in G.sections.items()}
    restrict = {phi: TwoFunctor(dict(F.obj), dict(F.arr), {(a, a): (F.arr[a],) * 2 for a in F.arr})
                for phi, F in G.restrict.items()}
    return TwoGroupoidPresheaf(G.site, sections, restrict)


def crossed_module(Q: FiniteGroup, N: FiniteGroup, boundary: Mapping, action: Mapping = None) -> TwoGroupoid:
    """One-object 2-groupoid: 1-cells Q, 2-cells ``(q, n): q => ∂(n)q``.

    ``action[q, n]`` is q acting on n; it defaults to trivial (then N must
    be abelian and central image is required for the axioms to hold).
    """
    act = action if action is not None else {(q, n): n for q in Q.elements for n in N.elements}
    ones = {q: ("*", "*") for q in Q.elements}
    twos = {(q, n): (q, Q.mul[boundary[n], q]) for q in Q.elements for n in N.elements}
    return TwoGroupoid(
        ("*",), ones, twos,
        lambda g, f: Q.mul[g, f], lambda x: Q.e, Q.inv.__getitem__,
        lambda b, a: (a[0], N.mul[b[1], a[1]]), lambda f: (f, N.e), lambda a: (Q.mul[boundary[a[1]], a[0]], N.inv[a[1]]),
        lambda b, a: (Q.mul[b[0], a[0]], N.mul[b[1], act[b[0], a[1]]]),
        name="crossed",
    )


def constant_two_presheaf(site: FiniteSite, H: TwoGroupoid) -> TwoGroupoidPresheaf:
    ident = TwoFunctor({x: x for x in H.objects}, {c: c for c in H.one_cells}, {c: c for c in H.two_cells})
    return TwoGroupoidPresheaf(site, {U: H for U in site.objects}, {f: ident for f in site.category.morphisms})


_INTERVAL = ("0", "1")


def _interval_section(H: TwoGroupoid) -> TwoGroupoid:
    objects = tuple((x, e) for x in H.objects for e in _INTERVAL)
    ones = {(f, s + t): ((x, s), (y, t)) for f, (x, y) in H.one_cells.items() for s in _INTERVAL for t in _INTERVAL}
    twos = {(a, tau): ((f, tau), (g, tau)) for a, (f, g) in H.two_cells.items() for tau in ("00", "01", "10", "11")}
    return TwoGroupoid(
        objects, ones, twos,
        lambda g, f: (H.comp1(g[0], f[0]), f[1][0] + g[1][1]),
        lambda x: (H.ident1(x[0]), x[1] + x[1]),
        lambda f: (H.inv1(f[0]), f[1][::-1]),
        lambda b, a: (H.vcomp(b[0], a[0]), a[1]),
        lambda f: (H.ident2(f[0]), f[1]),
        lambda a: (H.vinv(a[0]), a[1]),
        lambda b, a: (H.hcomp(b[0], a[0]), a[1][0] + b[1][1]),
    )


def interval_product(H: TwoGroupoidPresheaf) -> TwoGroupoidPresheaf:
    """H × 1, where 1 is the groupoid with two uniquely isomorphic objects."""
    sections = {U: _interval_section(S) for U, S in H.sections.items()}
    taus = ("00", "01", "10", "11")
    restrict = {}
    for phi, F in H.restrict.items():
        restrict[phi] = TwoFunctor(
            {(x, e): (y, e) for x, y in F.obj.items() for e in _INTERVAL},
            {(c, t): (d, t) for c, d in F.one.items() for t in taus},
            {(c, t): (d, t) for c, d in F.two.items() for t in taus},
        )
    return TwoGroupoidPresheaf(H.site, sections, restrict)


def interval_legs(H: TwoGroupoidPresheaf, HI: TwoGroupoidPresheaf) -> tuple[TwoMap, TwoMap]:
    """The two end inclusions H -> H × 1."""
    legs = []
    for e in _INTERVAL:
        legs.append(TwoMap(
            H, HI,
            {U: {x: (x, e) for x in S.objects} for U, S in H.sections.items()},
            {U: {c: (c, e + e) for c in S.one_cells} for U, S in H.sections.items()},
            {U: {c: (c, e + e) for c in S.two_cells} for U, S in H.sections.items()},
        ))
    return legs[0], legs[1]


def to_point(H: TwoGroupoidPresheaf) -> TwoMap:
    """The map to the terminal 2-groupoid presheaf."""
    pt = TwoGroupoid.from_tables(("*",), {"1": ("*", "*")}, {"1": ("1", "1")}, {("1", "1"): "1"}, {"*": "1"},
                                 {"1": "1"}, {("1", "1"): "1"}, {"1": "1"}, {"1": "1"}, {("1", "1"): "1"})
    P = constant_two_presheaf(H.site, pt)
    secs = H.sections
    return TwoMap(H, P, {U: {x: "*" for x in S.objects} for U, S in secs.items()},
                  {U: {c: "1" for c in S.one_cells} for U, S in secs.items()},
                  {U: {c: "1" for c in S.two_cells} for U, S in secs.items()})


# ---------------------------------------------------------------- path components


def _classes(S: TwoGroupoid) -> dict:
    uf = UnionFind(S.one_cells)
    for f, g in S.two_cells.values():
        uf.union(f, g)
    reps: dict = {}
    for f in sort(S.one_cells):
        reps.setdefault(uf[f], f)
    return {f: reps[uf[f]] for f in S.one_cells}


_PI: dict = {}


def pi_groupoid(H: TwoGroupoidPresheaf) -> tuple[GroupoidPresheaf, TwoMap]:
    """πH with η: H -> πH; each arrow of πH is named by its least 1-cell."""
    hit = _PI.get(id(H))
    if hit is not None and hit[0] is H:
        return hit[1]
    cat = H.site.category
    cls = {U: _classes(S) for U, S in H.sections.items()}
    sections = {}
    for U, S in H.sections.items():
        c = cls[U]
        reps = sort(set(c.values()))
        arrows = {f: S.one_cells[f] for f in reps}
        comp = {}
        for f in reps:
            for g in reps:
                if S.s1(g) == S.t1(f):
                    comp[g, f] = c[S.comp1(g, f)]
        sections[U] = Groupoid(S.objects, arrows, comp, {x: c[S.ident1(x)] for x in S.objects},
                               {f: c[S.inv1(f)] for f in reps})
    restrict = {}
    for phi, F in H.restrict.items():
        V = cat.src(phi)
        restrict[phi] = GFunctor(dict(F.obj), {f: cls[V][F.one[f]] for f in sections[cat.tgt(phi)].arrows})
    P = GroupoidPresheaf(H.site, sections, restrict)
    D = discrete_two(P)
    eta = TwoMap(
        H, D,
        {U: {x: x for x in S.objects} for U, S in H.sections.items()},
        {U: dict(cls[U]) for U in H.sections},
        {U: {a: (cls[U][S.s2(a)],) * 2 for a in S.two_cells} for U, S in H.sections.items()},
    )
    out = (P, eta)
    _PI[id(H)] = (H, out)
    return out


def pi_map(f: TwoMap) -> GroupoidMap:
    P, _ = pi_groupoid(f.source)
    Q, _ = pi_groupoid(f.target)
    cat = f.source.site.category
    arr = {}
    for U in cat.objects:
        c = _pi_classes(f.target, U)
        arr[U] = {a: c[f.one[U][a]] for a in P.sections[U].arrows}
    return GroupoidMap(P, Q, {U: dict(m) for U, m in f.obj.items()}, arr)


def _pi_classes(H: TwoGroupoidPresheaf, U) -> dict:
    _, eta = pi_groupoid(H)
    return eta.one[U]


def hom_groupoid_presheaf(H: TwoGroupoidPresheaf, U: str, x, y) -> GroupoidPresheaf:
    """The presheaf of groupoids H(x, y) on the slice over U."""
    S = H.sections[U]
    if x not in S.objects or y not in S.objects:
        raise TwoGroupoidError(f"{x!r} or {y!r} is not an object of H({U})")
    cat = H.site.category
    sl = slice_site(H.site, U)
    sections = {psi: H.sections[cat.src(psi)].hom_groupoid(H.r_obj(psi, x), H.r_obj(psi, y)) for psi in sl.objects}
    restrict = {}
    for m, (src, tgt) in sl.category.morphisms.items():
        h = m.rsplit("|", 1)[0]
        T = sections[tgt]
        restrict[m] = GFunctor({c: H.r_one(h, c) for c in T.objects}, {a: H.r_two(h, a) for a in T.arrows})
    return GroupoidPresheaf(sl, sections, restrict)


def pi2_presheaf(H: TwoGroupoidPresheaf, U: str, x) -> GroupPresheaf:
    """2-cells 1_x => 1_x under vertical composition, on the slice over U."""
    cat = H.site.category
    sl = slice_site(H.site, U)
    groups = {}
    for psi in sl.objects:
        S = H.sections[cat.src(psi)]
        one = S.ident1(H.r_obj(psi, x))
        els = S.two_between(one, one)
        G = FiniteGroup(els, {(a, b): S.vcomp(a, b) for a in els for b in els}, S.ident2(one),
                        {a: S.vinv(a) for a in els})
        if not G.is_abelian:
            raise TwoGroupoidError(f"2-cells on the identity of {x!r} over {psi} do not commute")
        groups[psi] = G
    restrict = {}
    for m, (src, tgt) in sl.category.morphisms.items():
        h = m.rsplit("|", 1)[0]
        restrict[m] = {a: H.r_two(h, a) for a in groups[tgt].elements}
    return GroupPresheaf(sl, groups, restrict)


def pi2_map(f: TwoMap, U: str, x) -> PresheafMap:
    A = pi2_presheaf(f.source, U, x)
    B = pi2_presheaf(f.target, U, f.obj[U][x])
    cat = f.source.site.category
    comps = {psi: {a: f.two[cat.src(psi)][a] for a in A.groups[psi].elements} for psi in A.site.objects}
    return PresheafMap(A.as_set, B.as_set, comps)


def homotopy_sheaves(H: TwoGroupoidPresheaf, basepoints=None) -> dict:
    """Sheafified π0, and π1, π2 at each basepoint ``(U, x)`` (default: all)."""
    from .gpd import aut_presheaf, sheafify_group

    P, _ = pi_groupoid(H)
    if basepoints is None:
        basepoints = [(U, x) for U in H.site.objects for x in sort(H.sections[U].objects)]
    out = {"pi0": sheafify(pi0(P))[0], "pi1": {}, "pi2": {}}
    for U, x in basepoints:
        out["pi1"][U, x] = sheafify_group(aut_presheaf(P, U, x))[0]
        out["pi2"][U, x] = sheafify_group(pi2_presheaf(H, U, x))[0]
    return out


def is_lwe2(f: TwoMap, method: str = "sieves") -> Verdict:
    """Local weak equivalence via π̃0, and π̃1, π̃2 at every object of every section."""
    pf = pi_map(f)
    v = is_local_iso(pi0_map(pf), method)
    if not v:
        return Verdict(False, ("pi0", v.witness))
    H = f.source
    for U in H.site.category.objects:
        for x in sort(H.sections[U].objects):
            w = is_local_iso(aut_map(pf, U, x), method)
            if not w:
                return Verdict(False, ("pi1", U, x, w.witness))
            w = is_local_iso(pi2_map(f, U, x), method)
            if not w:
                return Verdict(False, ("pi2", U, x, w.witness))
    return Verdict(True)


def to_pi0(A: TwoGroupoidPresheaf) -> TwoMap:
    """The canonical map A -> π0 A, the target a discrete 2-groupoid presheaf."""
    from .gpd import discrete_presheaf

    P, eta = pi_groupoid(A)
    D = discrete_two(discrete_presheaf(pi0(P)))
    comps = {U: P.sections[U].component_of for U in A.sections}
    return TwoMap(
        A, D,
        {U: dict(comps[U]) for U in A.sections},
        {U: {f: ("1", comps[U][S.s1(f)]) for f in S.one_cells} for U, S in A.sections.items()},
        {U: {a: (("1", comps[U][S.s1(S.s2(a))]),) * 2 for a in S.two_cells} for U, S in A.sections.items()},
    )


class LemmaCheck(NamedTuple):
    left: bool
    right: bool
    witness: object = None

    @property
    def agree(self) -> bool:
        return self.left == self.right


def _homs_cech(H: TwoGroupoidPresheaf):
    for U in H.site.objects:
        S = H.sections[U]
        for x in sort(S.objects):
            for y in sort(S.objects):
                v = is_cech(hom_groupoid_presheaf(H, U, x, y))
                if not v:
                    return Verdict(False, (U, x, y, v.witness))
    return Verdict(True)


def check_lemma6(H: TwoGroupoidPresheaf) -> LemmaCheck:
    """η: H -> πH is a local weak equivalence, versus every H(x, y) being Čech."""
    _, eta = pi_groupoid(H)
    left = is_lwe2(eta)
    right = _homs_cech(H)
    return LemmaCheck(bool(left), bool(right), (left.witness, right.witness))


def check_lemma8(A: TwoGroupoidPresheaf) -> LemmaCheck:
    """A -> π0 A is a local weak equivalence, versus every A(x, y) and πA being Čech."""
    left = is_lwe2(to_pi0(A))
    right = _homs_cech(A)
    if right:
        right = is_cech(pi_groupoid(A)[0])
    return LemmaCheck(bool(left), bool(right), (left.witness, right.witness))
