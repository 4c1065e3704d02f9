"""Groupoids, presheaves of groups and groupoids, Čech and gerbe predicates, local weak equivalences."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Callable, Hashable, Iterator, Mapping, NamedTuple

from ._util import UnionFind, Verdict, digest, sort, sortkey
from .groups import FiniteGroup, homomorphisms
from .presheaf import (
    PresheafMap,
    SetPresheaf,
    is_local_epi,
    is_local_iso,
    plus,
    presheaf_violations,
)
from .site import FiniteSite, slice_site

__all__ = [
    "Groupoid",
    "GFunctor",
    "GroupPresheaf",
    "GroupoidPresheaf",
    "GroupoidMap",
    "GroupoidError",
    "sheafify_group",
    "sheafify_group_map",
    "canonical_group_presheaf",
    "group_fingerprint",
    "sheaf_id",
    "functor_violations",
    "constant_group_presheaf",
    "pi0",
    "pi0_map",
    "cech_groupoid",
    "hom_presheaf",
    "aut_presheaf",
    "aut_map",
    "is_cech",
    "is_cech_definitional",
    "is_gerbe",
    "is_lwe",
    "discrete_presheaf",
    "to_pi0_map",
    "vertex_inclusion",
    "functors",
    "search_maps",
    "compose_gmaps",
    "identity_gmap",
]


class GroupoidError(ValueError):
    pass


class GFunctor(NamedTuple):
    obj: Mapping
    arr: Mapping


@dataclass(frozen=True, eq=False)
class Groupoid:
    objects: tuple
    arrows: Mapping[Hashable, tuple]  # id -> (source, target)
    comp: Mapping[tuple, Hashable]  # (g, f) -> g∘f
    ident: Mapping[Hashable, Hashable]
    inv: Mapping[Hashable, Hashable]

    def src(self, a):
        return self.arrows[a][0]

    def tgt(self, a):
        return self.arrows[a][1]

    @cached_property
    def _homs(self) -> dict:
        out: dict = {}
        for a in sort(self.arrows):
            out.setdefault(self.arrows[a], []).append(a)
        return {k: tuple(v) for k, v in out.items()}

    def hom(self, x, y) -> tuple:
        return self._homs.get((x, y), ())

    @cached_property
    def component_of(self) -> dict:
        uf = UnionFind(self.objects)
        for s, t in self.arrows.values():
            uf.union(s, t)
        reps: dict = {}
        for x in sort(self.objects):
            reps.setdefault(uf[x], x)
        return {x: reps[uf[x]] for x in self.objects}

    @cached_property
    def components(self) -> tuple:
        return tuple(sort(set(self.component_of.values())))

    def vertex_group(self, x) -> FiniteGroup:
        els = self.hom(x, x)
        return FiniteGroup(els, {(a, b): self.comp[a, b] for a in els for b in els}, self.ident[x],
                           {a: self.inv[a] for a in els})

    @classmethod
    def from_group(cls, G: FiniteGroup, obj="*") -> "Groupoid":
        return cls((obj,), {g: (obj, obj) for g in G.elements}, dict(G.mul), {obj: G.e}, dict(G.inv))

    @classmethod
    def discrete(cls, objects) -> "Groupoid":
        objects = tuple(sort(objects))
        arrows = {("1", x): (x, x) for x in objects}
        return cls(objects, arrows, {(a, a): a for a in arrows}, {x: ("1", x) for x in objects},
                   {a: a for a in arrows})

    @classmethod
    def codiscrete(cls, objects) -> "Groupoid":
        objects = tuple(sort(objects))
        arrows = {(y, x): (x, y) for x in objects for y in objects}
        comp = {((z, y), (y, x)): (z, x) for x in objects for y in objects for z in objects}
        return cls(objects, arrows, comp, {x: (x, x) for x in objects}, {(y, x): (x, y) for (y, x) in arrows})

    @classmethod
    def connected(cls, k: int, G: FiniteGroup) -> "Groupoid":
        """k objects, every hom-set a copy of G; arrow ``(y, g, x)`` from x to y."""
        objs = tuple(str(i) for i in range(k))
        arrows = {(y, g, x): (x, y) for x in objs for y in objs for g in G.elements}
        comp = {}
        for (y, g, x) in arrows:
            for z in objs:
                for h in G.elements:
                    comp[(z, h, y), (y, g, x)] = (z, G.mul[h, g], x)
        ident = {x: (x, G.e, x) for x in objs}
        inv = {(y, g, x): (x, G.inv[g], y) for (y, g, x) in arrows}
        return cls(objs, arrows, comp, ident, inv)

    def violations(self) -> list:
        out = []
        objs = set(self.objects)
        for a, (s, t) in self.arrows.items():
            if s not in objs or t not in objs:
                out.append(("arrow-endpoints", a))
        for x in self.objects:
            i = self.ident.get(x)
            if i is None or self.arrows.get(i) != (x, x):
                out.append(("identity", x))
        if out:
            return out
        for f in sort(self.arrows):
            s, t = self.arrows[f]
            if self.comp.get((f, self.ident[s])) != f or self.comp.get((self.ident[t], f)) != f:
                out.append(("unit", f))
            fi = self.inv.get(f)
            if fi is None or self.comp.get((fi, f)) != self.ident[s] or self.comp.get((f, fi)) != self.ident[t]:
                out.append(("inverse", f))
            for g in sort(a for y in self.objects for a in self.hom(t, y)):
                gf = self.comp.get((g, f))
                if gf is None or self.arrows.get(gf) != (s, self.tgt(g)):
                    out.append(("composition", g, f))
        if out:
            return out
        for f in self.arrows:
            s, t = self.arrows[f]
            for y in self.objects:
                for g in self.hom(t, y):
                    for z in self.objects:
                        for h in self.hom(y, z):
                            if self.comp[self.comp[h, g], f] != self.comp[h, self.comp[g, f]]:
                                out.append(("associativity", h, g, f))
                                return out
        return out


def functor_violations(F: GFunctor, A: Groupoid, B: Groupoid) -> list:
    out = []
    for x in A.objects:
        if F.obj.get(x) not in set(B.objects):
            out.append(("object", x))
        elif F.arr.get(A.ident[x]) != B.ident[F.obj[x]]:
            out.append(("identity", x))
    if out:
        return out
    for a, (s, t) in A.arrows.items():
        if B.arrows.get(F.arr.get(a)) != (F.obj[s], F.obj[t]):
            out.append(("arrow", a))
    if out:
        return out
    for (g, f), gf in A.comp.items():
        if F.arr[gf] != B.comp[F.arr[g], F.arr[f]]:
            out.append(("composition", g, f))
    return out


# ---------------------------------------------------------------- presheaves of groups


@dataclass(frozen=True, eq=False)
class GroupPresheaf:
    site: FiniteSite
    groups: Mapping[str, FiniteGroup]
    restrict: Mapping[str, Mapping]  # homomorphisms

    def res(self, phi, g):
        return self.restrict[phi][g]

    @cached_property
    def as_set(self) -> SetPresheaf:
        return SetPresheaf(self.site, {U: G.elements for U, G in self.groups.items()}, self.restrict)

    def violations(self) -> list:
        out = [("set",) + v for v in presheaf_violations(self.as_set)]
        for U, G in self.groups.items():
            out += [("group", U) + v for v in G.violations()]
        if out:
            return out
        cat = self.site.category
        for f, (V, U) in cat.morphisms.items():
            G, H, r = self.groups[U], self.groups[V], self.restrict[f]
            for a in G.elements:
                for b in G.elements:
                    if r[G.mul[a, b]] != H.mul[r[a], r[b]]:
                        out.append(("homomorphism", f, a, b))
                        return out
        return out

    def is_trivial(self) -> bool:
        return all(len(G) == 1 for G in self.groups.values())


def constant_group_presheaf(site: FiniteSite, G: FiniteGroup) -> GroupPresheaf:
    cat = site.category
    return GroupPresheaf(
        site,
        {U: G for U in cat.objects},
        {f: {g: g for g in G.elements} for f in cat.morphisms},
    )


def _plus_group(P: GroupPresheaf) -> tuple[GroupPresheaf, PresheafMap]:
    X1, unit = plus(P.as_set)
    site = P.site
    cat = site.category
    groups = {}
    for U in cat.objects:
        fams = X1.sections[U]
        members = sort(site.min_cover(U))
        srcs = [P.groups[cat.src(f)] for f in members]

        def op(s, t, srcs=srcs, members=members):
            return tuple((f, G.mul[a, b]) for f, G, (_, a), (_, b) in zip(members, srcs, s, t))

        e = tuple((f, G.e) for f, G in zip(members, srcs))
        mul = {(s, t): op(s, t) for s in fams for t in fams}
        inv = {s: tuple((f, G.inv[a]) for G, (f, a) in zip(srcs, s)) for s in fams}
        groups[U] = FiniteGroup(fams, mul, e, inv)
    return GroupPresheaf(site, groups, X1.restrict), unit


_SHEAF_GROUPS: dict = {}


def sheafify_group(P: GroupPresheaf) -> tuple[GroupPresheaf, PresheafMap]:
    """Associated sheaf of groups with the unit homomorphism (memoized)."""
    hit = _SHEAF_GROUPS.get(id(P))
    if hit is not None and hit[0] is P:
        return hit[1]
    P1, u1 = _plus_group(P)
    P2, u2 = _plus_group(P1)
    comps = {U: {x: u2(U, u1(U, x)) for x in P.groups[U].elements} for U in P.groups}
    out = (P2, PresheafMap(P.as_set, P2.as_set, comps))
    _SHEAF_GROUPS[id(P)] = (P, out)
    return out


def sheafify_group_map(p: PresheafMap, source: GroupPresheaf, target: GroupPresheaf) -> PresheafMap:
    """Sheafification of a homomorphism of group presheaves, between the sheafified groups."""
    S2, _ = sheafify_group(source)
    T2, _ = sheafify_group(target)
    cat = source.site.category

    def push(fam, fn):
        return tuple((f, fn(cat.src(f), v)) for f, v in fam)

    comps = {}
    for U in cat.objects:
        comps[U] = {s: push(s, lambda V, t: push(t, p)) for s in S2.groups[U].elements}
    return PresheafMap(S2.as_set, T2.as_set, comps)


def canonical_group_presheaf(P: GroupPresheaf) -> tuple[GroupPresheaf, dict]:
    """Rename elements of each section to ``"0".."n-1"`` in sorted order."""
    rename = {U: {x: str(i) for i, x in enumerate(sort(G.elements))} for U, G in P.groups.items()}
    groups = {}
    for U, G in P.groups.items():
        r = rename[U]
        els = tuple(r[x] for x in sort(G.elements))
        groups[U] = FiniteGroup(els, {(r[a], r[b]): r[c] for (a, b), c in G.mul.items()}, r[G.e],
                                {r[a]: r[b] for a, b in G.inv.items()})
    cat = P.site.category
    restrict = {}
    for f, (V, U) in cat.morphisms.items():
        rU, rV = rename[U], rename[V]
        restrict[f] = {rU[a]: rV[b] for a, b in P.restrict[f].items()}
    return GroupPresheaf(P.site, groups, restrict), rename


def group_fingerprint(P: GroupPresheaf) -> tuple:
    cat = P.site.category
    parts = []
    for U in sort(cat.objects):
        G = P.groups[U]
        els = sort(G.elements)
        parts.append((U, tuple(els), tuple(G.mul[a, b] for a in els for b in els), G.e))
    for f in sort(cat.morphisms):
        els = sort(P.groups[cat.tgt(f)].elements)
        parts.append((f, tuple(P.restrict[f][a] for a in els)))
    return tuple(parts)


def sheaf_id(P: GroupPresheaf) -> str:
    return "S" + digest(group_fingerprint(P))


# ---------------------------------------------------------------- presheaves of groupoids


@dataclass(frozen=True, eq=False)
class GroupoidPresheaf:
    site: FiniteSite
    sections: Mapping[str, Groupoid]
    restrict: Mapping[str, GFunctor]

    def res_obj(self, phi, x):
        return self.restrict[phi].obj[x]

    def res_arr(self, phi, a):
        return self.restrict[phi].arr[a]

    @cached_property
    def ob(self) -> SetPresheaf:
        return SetPresheaf(
            self.site,
            {U: tuple(sort(G.objects)) for U, G in self.sections.items()},
            {f: F.obj for f, F in self.restrict.items()},
        )

    @cached_property
    def mor(self) -> SetPresheaf:
        return SetPresheaf(
            self.site,
            {U: tuple(sort(G.arrows)) for U, G in self.sections.items()},
            {f: F.arr for f, F in self.restrict.items()},
        )

    def violations(self) -> list:
        out = []
        cat = self.site.category
        for U in cat.objects:
            out += [("section", U) + v for v in self.sections[U].violations()]
        if out:
            return out
        for f, (V, U) in cat.morphisms.items():
            out += [("restriction", f) + v for v in functor_violations(self.restrict[f], self.sections[U], self.sections[V])]
        if out:
            return out
        out += [("objects",) + v for v in presheaf_violations(self.ob)]
        out += [("arrows",) + v for v in presheaf_violations(self.mor)]
        return out

    @classmethod
    def from_group_presheaf(cls, P: GroupPresheaf, obj="*") -> "GroupoidPresheaf":
        sections = {U: Groupoid.from_group(G, obj) for U, G in P.groups.items()}
        restrict = {f: GFunctor({obj: obj}, r) for f, r in P.restrict.items()}
        return cls(P.site, sections, restrict)

    def global_objects(self) -> list[dict]:
        """Compatible families of objects over all site objects (global sections of Ob)."""
        cat = self.site.category
        out = []
        objs = list(cat.objects)
        for choice in product(*(self.sections[U].objects for U in objs)):
            sel = dict(zip(objs, choice))
            if all(self.res_obj(f, sel[U]) == sel[V] for f, (V, U) in cat.morphisms.items()):
                out.append(sel)
        return out


@dataclass(frozen=True, eq=False)
class GroupoidMap:
    source: GroupoidPresheaf
    target: GroupoidPresheaf
    obj: Mapping[str, Mapping]
    arr: Mapping[str, Mapping]

    def at(self, U) -> GFunctor:
        return GFunctor(self.obj[U], self.arr[U])

    def violations(self) -> list:
        G, H = self.source, self.target
        cat = G.site.category
        out = []
        for U in cat.objects:
            out += [(U,) + v for v in functor_violations(self.at(U), G.sections[U], H.sections[U])]
        if out:
            return out
        for f, (V, U) in cat.morphisms.items():
            for x in G.sections[U].objects:
                if self.obj[V][G.res_obj(f, x)] != H.res_obj(f, self.obj[U][x]):
                    out.append(("naturality-object", f, x))
            for a in G.sections[U].arrows:
                if self.arr[V][G.res_arr(f, a)] != H.res_arr(f, self.arr[U][a]):
                    out.append(("naturality-arrow", f, a))
        return out


def identity_gmap(G: GroupoidPresheaf) -> GroupoidMap:
    return GroupoidMap(G, G, {U: {x: x for x in S.objects} for U, S in G.sections.items()},
                       {U: {a: a for a in S.arrows} for U, S in G.sections.items()})


def compose_gmaps(g: GroupoidMap, f: GroupoidMap) -> GroupoidMap:
    return GroupoidMap(
        f.source,
        g.target,
        {U: {x: g.obj[U][y] for x, y in f.obj[U].items()} for U in f.obj},
        {U: {a: g.arr[U][b] for a, b in f.arr[U].items()} for U in f.arr},
    )


# ---------------------------------------------------------------- constructions


def pi0(G: GroupoidPresheaf) -> SetPresheaf:
    """Presheaf of path components, each named by its least object."""
    cat = G.site.category
    sections = {U: G.sections[U].components for U in cat.objects}
    restrict = {}
    for f, (V, U) in cat.morphisms.items():
        comp_V = G.sections[V].component_of
        restrict[f] = {c: comp_V[G.res_obj(f, c)] for c in sections[U]}
    return SetPresheaf(G.site, sections, restrict)


def pi0_map(f: GroupoidMap) -> PresheafMap:
    P, Q = pi0(f.source), pi0(f.target)
    comps = {}
    for U in f.source.site.category.objects:
        cH = f.target.sections[U].component_of
        comps[U] = {c: cH[f.obj[U][c]] for c in P.sections[U]}
    return PresheafMap(P, Q, comps)


def cech_groupoid(p: PresheafMap) -> GroupoidPresheaf:
    """Objects X; a unique arrow ``(y, x)`` from x to y whenever p(x) = p(y)."""
    X = p.source
    cat = X.site.category
    sections = {}
    for U in cat.objects:
        objs = tuple(sort(X.sections[U]))
        arrows = {(y, x): (x, y) for x in objs for y in objs if p(U, x) == p(U, y)}
        comp = {((z, y), (y2, x)): (z, x) for (y2, x) in arrows for (z, y) in arrows if y == y2}
        sections[U] = Groupoid(objs, arrows, comp, {x: (x, x) for x in objs}, {(y, x): (x, y) for (y, x) in arrows})
    restrict = {}
    for f in cat.morphisms:
        r = X.restrict[f]
        src_arrows = sections[cat.tgt(f)].arrows
        restrict[f] = GFunctor(dict(r), {(y, x): (r[y], r[x]) for (y, x) in src_arrows})
    return GroupoidPresheaf(X.site, sections, restrict)


def discrete_presheaf(X: SetPresheaf) -> GroupoidPresheaf:
    cat = X.site.category
    sections = {U: Groupoid.discrete(X.sections[U]) for U in cat.objects}
    restrict = {f: GFunctor(dict(X.restrict[f]), {("1", x): ("1", y) for x, y in X.restrict[f].items()})
                for f in cat.morphisms}
    return GroupoidPresheaf(X.site, sections, restrict)


def to_pi0_map(G: GroupoidPresheaf) -> GroupoidMap:
    """The canonical map G -> π0 G, the target viewed as a discrete groupoid presheaf."""
    D = discrete_presheaf(pi0(G))
    obj, arr = {}, {}
    for U, S in G.sections.items():
        c = S.component_of
        obj[U] = dict(c)
        arr[U] = {a: ("1", c[S.src(a)]) for a in S.arrows}
    return GroupoidMap(G, D, obj, arr)


def hom_presheaf(G: GroupoidPresheaf, U: str, x, y) -> SetPresheaf:
    """The presheaf G(x, y) of arrows x -> y on the slice over U."""
    S = G.sections[U]
    if x not in S.objects or y not in S.objects:
        raise GroupoidError(f"{x!r} or {y!r} is not an object of G({U})")
    site = G.site
    sl = slice_site(site, U)
    cat = site.category
    sections, restrict = {}, {}
    for psi in sl.objects:
        V = cat.src(psi)
        sections[psi] = G.sections[V].hom(G.res_obj(psi, x), G.res_obj(psi, y))
    for m, (src, tgt) in sl.category.morphisms.items():
        h = m.rsplit("|", 1)[0]
        restrict[m] = {a: G.res_arr(h, a) for a in sections[tgt]}
    return SetPresheaf(sl, sections, restrict)


_AUT: dict = {}


def aut_presheaf(G: GroupoidPresheaf, U: str, x) -> GroupPresheaf:
    """The presheaf of automorphism groups of x on the slice over U (memoized)."""
    key = (id(G), U, x)
    hit = _AUT.get(key)
    if hit is not None and hit[0] is G:
        return hit[1]
    H = hom_presheaf(G, U, x, x)
    cat = G.site.category
    groups = {}
    for psi in H.site.objects:
        groups[psi] = G.sections[cat.src(psi)].vertex_group(G.res_obj(psi, x))
    out = GroupPresheaf(H.site, groups, H.restrict)
    _AUT[key] = (G, out)
    return out


def aut_map(f: GroupoidMap, U: str, x) -> PresheafMap:
    A = aut_presheaf(f.source, U, x)
    B = aut_presheaf(f.target, U, f.obj[U][x])
    cat = f.source.site.category
    comps = {psi: {a: f.arr[cat.src(psi)][a] for a in A.groups[psi].elements} for psi in A.site.objects}
    return PresheafMap(A.as_set, B.as_set, comps)


def is_cech(G: GroupoidPresheaf) -> Verdict:
    """Parallel arrows agree on a covering sieve; witness ``(U, f, g)``."""
    site = G.site
    cat = site.category
    for U in cat.objects:
        S = G.sections[U]
        into = cat.into(U)
        for (x, y), arrows in sorted(S._homs.items(), key=lambda kv: sortkey(kv[0])):
            for i, a in enumerate(arrows):
                for b in arrows[i + 1:]:
                    sieve = frozenset(phi for phi in into if G.res_arr(phi, a) == G.res_arr(phi, b))
                    if sieve not in site.covering[U]:
                        return Verdict(False, (U, a, b))
    return Verdict(True)


def is_cech_definitional(G: GroupoidPresheaf, method: str = "sieves") -> Verdict:
    return is_lwe(to_pi0_map(G), method)


def is_gerbe(G: GroupoidPresheaf) -> Verdict:
    """Locally connected and locally nonempty; witness names the failing condition."""
    site = G.site
    cat = site.category
    for U in cat.objects:
        into = cat.into(U)
        objs = sort(G.sections[U].objects)
        for i, x in enumerate(objs):
            for y in objs[i + 1:]:
                sieve = frozenset(
                    phi for phi in into
                    if G.sections[cat.src(phi)].hom(G.res_obj(phi, x), G.res_obj(phi, y))
                )
                if sieve not in site.covering[U]:
                    return Verdict(False, ("connectivity", U, x, y))
    ob = G.ob
    point = SetPresheaf(site, {U: ("*",) for U in cat.objects}, {f: {"*": "*"} for f in cat.morphisms})
    to_point = PresheafMap(ob, point, {U: {x: "*" for x in ob.sections[U]} for U in cat.objects})
    e = is_local_epi(to_point)
    if not e:
        return Verdict(False, ("nonempty", e.witness[0]))
    return Verdict(True)


def is_lwe(f: GroupoidMap, method: str = "sieves") -> Verdict:
    """Local weak equivalence: iso on sheafified π0 and on every automorphism sheaf."""
    v = is_local_iso(pi0_map(f), method)
    if not v:
        return Verdict(False, ("pi0", v.witness))
    G = f.source
    for U in G.site.category.objects:
        for x in sort(G.sections[U].objects):
            w = is_local_iso(aut_map(f, U, x), method)
            if not w:
                return Verdict(False, ("pi1", U, x, w.witness))
    return Verdict(True)


def vertex_inclusion(G: GroupoidPresheaf, x: Mapping[str, Hashable]) -> GroupoidMap:
    """Inclusion of the automorphism presheaf of a global object x into G."""
    cat = G.site.category
    sections, restrict = {}, {}
    for U in cat.objects:
        sub = G.sections[U].vertex_group(x[U])
        sections[U] = Groupoid.from_group(sub, x[U])
    for f, (V, U) in cat.morphisms.items():
        restrict[f] = GFunctor({x[U]: x[V]}, {a: G.res_arr(f, a) for a in sections[U].arrows})
    Gx = GroupoidPresheaf(G.site, sections, restrict)
    return GroupoidMap(Gx, G, {U: {x[U]: x[U]} for U in cat.objects},
                       {U: {a: a for a in sections[U].arrows} for U in cat.objects})


# ---------------------------------------------------------------- functor search


def functors(A: Groupoid, B: Groupoid, obj_ok: Callable = None) -> Iterator[GFunctor]:
    """All functors A -> B, optionally restricting object images by ``obj_ok(x, y)``."""
    per_component = []
    for b in A.components:
        members = [x for x in sort(A.objects) if A.component_of[x] == b]
        tree = {b: A.ident[b]}
        frontier = [b]
        while frontier:
            nxt = []
            for y in frontier:
                for z in members:
                    if z not in tree:
                        arrows = A.hom(y, z)
                        if arrows:
                            tree[z] = A.comp[arrows[0], tree[y]]
                            nxt.append(z)
            frontier = nxt
        per_component.append((b, members, tree, A.vertex_group(b)))

    def comp_choices(b, members, tree, vg):
        for Fb in sort(B.objects):
            if obj_ok is not None and not obj_ok(b, Fb):
                continue
            for rho in homomorphisms(vg, B.vertex_group(Fb)):
                others = [y for y in members if y != b]
                opts = []
                for y in others:
                    opts.append([(Fy, t) for Fy in sort(B.objects)
                                 if obj_ok is None or obj_ok(y, Fy)
                                 for t in B.hom(Fb, Fy)])
                for pick in product(*opts):
                    obj = {b: Fb}
                    img = {b: B.ident[Fb]}
                    for y, (Fy, t) in zip(others, pick):
                        obj[y] = Fy
                        img[y] = t
                    arr = {}
                    for a, (s, t) in A.arrows.items():
                        if s not in obj:
                            continue
                        loop = A.comp[A.inv[tree[t]], A.comp[a, tree[s]]]
                        arr[a] = B.comp[img[t], B.comp[rho[loop], B.inv[img[s]]]]
                    yield obj, arr

    def rec(k, obj, arr):
        if k == len(per_component):
            yield GFunctor(dict(obj), dict(arr))
            return
        for o, a in comp_choices(*per_component[k]):
            yield from rec(k + 1, {**obj, **o}, {**arr, **a})

    yield from rec(0, {}, {})


def _site_order(site: FiniteSite) -> list:
    cat = site.category
    order = []
    remaining = list(cat.objects)
    while remaining:
        best = max(remaining, key=lambda U: (sum(1 for V in order if cat.hom(U, V) or cat.hom(V, U)), -len(cat.into(U)), sortkey(U)))
        order.append(best)
        remaining.remove(best)
    return order


def search_maps(G: GroupoidPresheaf, H: GroupoidPresheaf, obj_ok: Callable = None) -> Iterator[GroupoidMap]:
    """All natural maps G -> H, by backtracking over site objects.

    ``obj_ok(U, x, y)`` may veto sending object x of G(U) to y.
    """
    cat = G.site.category
    order = _site_order(G.site)
    chosen: dict = {}

    def compatible(U, F) -> bool:
        for V, FV in chosen.items():
            for f in cat.hom(V, U):
                r_G, r_H = G.restrict[f], H.restrict[f]
                if any(FV.obj[r_G.obj[x]] != r_H.obj[F.obj[x]] for x in G.sections[U].objects):
                    return False
                if any(FV.arr[r_G.arr[a]] != r_H.arr[F.arr[a]] for a in G.sections[U].arrows):
                    return False
            for f in cat.hom(U, V):
                r_G, r_H = G.restrict[f], H.restrict[f]
                if any(F.obj[r_G.obj[x]] != r_H.obj[FV.obj[x]] for x in G.sections[V].objects):
                    return False
                if any(F.arr[r_G.arr[a]] != r_H.arr[FV.arr[a]] for a in G.sections[V].arrows):
                    return False
        for f in cat.hom(U, U):
            r_G, r_H = G.restrict[f], H.restrict[f]
            if any(F.obj[r_G.obj[x]] != r_H.obj[F.obj[x]] for x in G.sections[U].objects):
                return False
            if any(F.arr[r_G.arr[a]] != r_H.arr[F.arr[a]] for a in G.sections[U].arrows):
                return False
        return True

    def rec(k):
        if k == len(order):
            yield GroupoidMap(G, H, {U: dict(F.obj) for U, F in chosen.items()},
                              {U: dict(F.arr) for U, F in chosen.items()})
            return
        U = order[k]
        ok = None if obj_ok is None else (lambda x, y: obj_ok(U, x, y))
        for F in functors(G.sections[U], H.sections[U], ok):
            if compatible(U, F):
                chosen[U] = F
                yield from rec(k + 1)
                del chosen[U]

    yield from rec(0)
