"""Finite atlases of sheaves of groups, with all isomorphisms and conjugation homotopies.

An atlas lists, for every site object U, sheaves of groups on the slice over
U in canonical form (elements renamed ``"0".."n-1"``). Canonical sheaves are
compared by data, so restriction along φ: V -> U lands on the nose in the
list for V. The induced presheaf of 2-groupoids has:

* 1-cells: every isomorphism ``(src, tgt, comps)`` where ``comps[i]`` is the
  image tuple of the component at the i-th slice object;
* 2-cells: ``(f, k)`` for every global section k of the target, from f to
  ``c_k ∘ f`` (conjugation by k, restricted to each slice object).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from ._util import Verdict, sort
from .gpd import (
    GroupoidPresheaf,
    GroupPresheaf,
    aut_presheaf,
    canonical_group_presheaf,
    is_gerbe,
    sheaf_id,
    sheafify_group,
    sheafify_group_map,
)
from .groups import FiniteGroup, isomorphisms
from .presheaf import PresheafMap, is_sheaf
from .site import FiniteSite, slice_site
from .two_gpd import TwoFunctor, TwoGroupoid, TwoGroupoidPresheaf, TwoMap, resolution

__all__ = [
    "AtlasError",
    "GroupSheafAtlas",
    "make_atlas",
    "constant_atlas",
    "saturate_atlas",
    "pullback_sheaf",
    "canonical_sheaf",
    "sheaf_isomorphisms",
    "atlas_violations",
    "atlas_inclusion",
    "locally_isomorphic",
    "g_star",
    "canonical_cocycle",
    "conjugation_iso",
    "reversed_copy",
]


class AtlasError(ValueError):
    pass


def canonical_sheaf(P: GroupPresheaf) -> tuple[str, GroupPresheaf, dict]:
    C, rename = canonical_group_presheaf(P)
    return sheaf_id(C), C, rename


def pullback_sheaf(P: GroupPresheaf, site: FiniteSite, U: str, phi: str) -> GroupPresheaf:
    """Restrict a presheaf on the slice over U along φ: V -> U to the slice over V."""
    cat = site.category
    V = cat.src(phi)
    slV = slice_site(site, V)
    groups = {psi: P.groups[cat.comp(phi, psi)] for psi in slV.objects}
    restrict = {}
    for m, (src, tgt) in slV.category.morphisms.items():
        h = m.rsplit("|", 1)[0]
        restrict[m] = P.restrict[f"{h}|{cat.comp(phi, tgt)}"]
    return GroupPresheaf(slV, groups, restrict)


def _natural_isos(P: GroupPresheaf, Q: GroupPresheaf, objs: tuple):
    """Natural isomorphisms P -> Q, as dicts ``{slice object: component}``, by backtracking."""
    scat = P.site.category
    if any(len(P.groups[o]) != len(Q.groups[o]) for o in objs):
        return
    # fewest candidate automorphisms first keeps the search narrow
    order = sorted(objs, key=lambda o: (len(P.groups[o]), objs.index(o)))
    chosen: dict = {}

    def ok(o, f) -> bool:
        for m, (s, t) in scat.morphisms.items():
            if t == o and s in chosen or s == o and t in chosen or s == o and t == o:
                fs = f if s == o else chosen[s]
                ft = f if t == o else chosen[t]
                rP, rQ = P.restrict[m], Q.restrict[m]
                if any(fs[rP[g]] != rQ[ft[g]] for g in P.groups[t].elements):
                    return False
        return True

    def rec(k):
        if k == len(order):
            yield dict(chosen)
            return
        o = order[k]
        for f in isomorphisms(P.groups[o], Q.groups[o]):
            if ok(o, f):
                chosen[o] = f
                yield from rec(k + 1)
                del chosen[o]

    yield from rec(0)


def _encode_iso(comps: Mapping, objs: tuple, P: GroupPresheaf) -> tuple:
    return tuple(tuple(comps[o][g] for g in P.groups[o].elements) for o in objs)


def sheaf_isomorphisms(P: GroupPresheaf, Q: GroupPresheaf) -> list[tuple]:
    """All isomorphisms P -> Q, each encoded as per-slice-object image tuples."""
    objs = P.site.objects
    return sort(_encode_iso(c, objs, P) for c in _natural_isos(P, Q, objs))


@dataclass(frozen=True, eq=False)
class GroupSheafAtlas:
    site: FiniteSite
    sheaves: Mapping[str, Mapping[str, GroupPresheaf]]  # U -> sheaf id -> canonical sheaf on slice(U)
    given_isos: Mapping = field(default=None)  # optional (U, src, tgt) -> iso comps tuples, e.g. loaded from a file
    name: str = field(default="atlas", compare=False)

    def objects(self, U) -> list:
        return sort(self.sheaves[U])

    def sheaf(self, U, sid) -> GroupPresheaf:
        return self.sheaves[U][sid]

    def slice_objects(self, U) -> tuple:
        return self.site.category.into(U)

    def id_index(self, U) -> int:
        return self.slice_objects(U).index(self.site.category.identities[U])

    def global_group(self, U, sid) -> FiniteGroup:
        return self.sheaves[U][sid].groups[self.site.category.identities[U]]

    def size(self) -> int:
        return sum(len(v) for v in self.sheaves.values())

    @cached_property
    def _isos(self) -> dict:
        out = {}
        for U in self.site.objects:
            for a in self.objects(U):
                for b in self.objects(U):
                    key = (U, a, b)
                    if self.given_isos is not None:
                        out[key] = tuple(self.given_isos.get(key, ()))
                    else:
                        out[key] = tuple(sheaf_isomorphisms(self.sheaves[U][a], self.sheaves[U][b]))
        return out

    def isos(self, U, a, b) -> tuple:
        return self._isos[U, a, b]

    # ---- cell operations on the 2-groupoid over U

    def apply(self, U, f, psi_index, g):
        return f[2][psi_index][int(g)]

    def comp1(self, U, g, f):
        comps = tuple(tuple(gc[int(x)] for x in fc) for fc, gc in zip(f[2], g[2]))
        return (f[0], g[1], comps)

    def ident1(self, U, sid):
        P = self.sheaves[U][sid]
        return (sid, sid, tuple(P.groups[o].elements for o in self.slice_objects(U)))

    def inv1(self, U, f):
        comps = []
        for fc in f[2]:
            inv = [None] * len(fc)
            for i, y in enumerate(fc):
                inv[int(y)] = str(i)
            comps.append(tuple(inv))
        return (f[1], f[0], tuple(comps))

    def restrict_global(self, U, sid, phi, k):
        """Restrict a global section k of the sheaf to the slice object φ."""
        cat = self.site.category
        return self.sheaves[U][sid].restrict[f"{phi}|{cat.identities[U]}"][k]

    def conj_iso(self, U, f, k):
        """``c_k ∘ f`` for a global section k of the target of f."""
        Q = self.sheaves[U][f[1]]
        comps = []
        for psi, fc in zip(self.slice_objects(U), f[2]):
            G = Q.groups[psi]
            kp = self.restrict_global(U, f[1], psi, k)
            comps.append(tuple(G.conj(kp, y) for y in fc))
        return (f[0], f[1], tuple(comps))

    def global_apply(self, U, f, k):
        return f[2][self.id_index(U)][int(k)]

    @cached_property
    def two(self) -> TwoGroupoidPresheaf:
        """The atlas as a presheaf of 2-groupoids."""
        site = self.site
        cat = site.category
        sections = {}
        for U in site.objects:
            sections[U] = self._section(U)
        restrict = {}
        for phi, (V, U) in cat.morphisms.items():
            restrict[phi] = self._restriction(phi, sections[U])
        return TwoGroupoidPresheaf(site, sections, restrict)

    def _section(self, U) -> TwoGroupoid:
        objs = tuple(self.objects(U))
        ones = {}
        for a in objs:
            for b in objs:
                for c in self.isos(U, a, b):
                    ones[(a, b, c)] = (a, b)
        twos = {}
        for f in ones:
            G = self.global_group(U, f[1])
            for k in G.elements:
                twos[(f, k)] = (f, self.conj_iso(U, f, k))

        def vcomp(b, a):
            G = self.global_group(U, a[0][1])
            return (a[0], G.mul[b[1], a[1]])

        def vinv(a):
            G = self.global_group(U, a[0][1])
            return (self.conj_iso(U, a[0], a[1]), G.inv[a[1]])

        def hcomp(b, a):
            G = self.global_group(U, b[0][1])
            return (self.comp1(U, b[0], a[0]), G.mul[b[1], self.global_apply(U, b[0], a[1])])

        def ident2(f):
            return (f, self.global_group(U, f[1]).e)

        return TwoGroupoid(
            objs, ones, twos,
            lambda g, f: self.comp1(U, g, f), lambda x: self.ident1(U, x), lambda f: self.inv1(U, f),
            vcomp, ident2, vinv, hcomp, name=f"atlas/{U}",
        )

    def restrict_sheaf_id(self, phi, sid) -> str:
        return self._pullback_ids[phi][sid]

    @cached_property
    def _pullback_ids(self) -> dict:
        cat = self.site.category
        out = {}
        for phi, (V, U) in cat.morphisms.items():
            out[phi] = {}
            for sid, P in self.sheaves[U].items():
                Q = pullback_sheaf(P, self.site, U, phi)
                qid = sheaf_id(Q)
                if qid not in self.sheaves[V]:
                    raise AtlasError(f"restriction of {sid} along {phi} is not in the atlas")
                out[phi][sid] = qid
        return out

    def restrict_iso(self, phi, f):
        cat = self.site.category
        U = cat.tgt(phi)
        V = cat.src(phi)
        pos = {o: i for i, o in enumerate(self.slice_objects(U))}
        comps = tuple(f[2][pos[cat.comp(phi, psi)]] for psi in self.slice_objects(V))
        return (self.restrict_sheaf_id(phi, f[0]), self.restrict_sheaf_id(phi, f[1]), comps)

    def _restriction(self, phi, S: TwoGroupoid) -> TwoFunctor:
        U = self.site.category.tgt(phi)
        obj = {x: self.restrict_sheaf_id(phi, x) for x in S.objects}
        one = {f: self.restrict_iso(phi, f) for f in S.one_cells}
        two = {(f, k): (one[f], self.restrict_global(U, f[1], phi, k)) for (f, k) in S.two_cells}
        return TwoFunctor(obj, one, two)


def reversed_copy(P: GroupPresheaf) -> GroupPresheaf:
    """An isomorphic copy of a canonical sheaf with element names reversed at every slice object."""
    rename = {o: {g: str(len(G) - 1 - i) for i, g in enumerate(G.elements)} for o, G in P.groups.items()}
    groups = {}
    for o, G in P.groups.items():
        r = rename[o]
        groups[o] = FiniteGroup(tuple(sort(r.values())), {(r[a], r[b]): r[c] for (a, b), c in G.mul.items()},
                                r[G.e], {r[a]: r[b] for a, b in G.inv.items()})
    cat = P.site.category
    restrict = {m: {rename[t][a]: rename[s][b] for a, b in P.restrict[m].items()}
                for m, (s, t) in cat.morphisms.items()}
    return GroupPresheaf(P.site, groups, restrict)


def make_atlas(site: FiniteSite, sheaves, name: str = "atlas") -> GroupSheafAtlas:
    """Atlas from ``(U, sheaf on slice(U))`` pairs, closed under restriction."""
    return saturate_atlas(GroupSheafAtlas(site, {U: {} for U in site.objects}, name=name), sheaves)


def saturate_atlas(atlas: GroupSheafAtlas, sheaves) -> GroupSheafAtlas:
    """Add sheaves (canonicalized) and everything reachable by restriction; deterministic."""
    site = atlas.site
    cat = site.category
    table = {U: dict(v) for U, v in atlas.sheaves.items()}
    todo = [(U, canonical_sheaf(P)) for U, P in sheaves]
    changed = False
    while todo:
        nxt = []
        for U, (sid, C, _) in todo:
            if sid in table[U]:
                continue
            table[U][sid] = C
            changed = True
            for phi in cat.into(U):
                V = cat.src(phi)
                if phi == cat.identities[U]:
                    continue
                Q = pullback_sheaf(C, site, U, phi)
                nxt.append((V, (sheaf_id(Q), Q, None)))
        todo = nxt
    if not changed:
        return atlas
    return GroupSheafAtlas(site, table, None, atlas.name)


def constant_atlas(site: FiniteSite, group: FiniteGroup, name: str = None) -> GroupSheafAtlas:
    """The sheafified constant sheaf of ``group`` over every object."""
    from .gpd import constant_group_presheaf

    items = []
    for U in site.objects:
        sl = slice_site(site, U)
        S, _ = sheafify_group(constant_group_presheaf(sl, group))
        items.append((U, S))
    return make_atlas(site, items, name or f"const-{group.name}")


def atlas_violations(atlas: GroupSheafAtlas, check_fullness: bool = True) -> list:
    """Sheaf condition, restriction closure and fullness of the isomorphism sets."""
    out = []
    for U in atlas.site.objects:
        for sid in atlas.objects(U):
            P = atlas.sheaves[U][sid]
            v = P.violations()
            if v:
                out.append(("group-presheaf", U, sid, v[0]))
                continue
            if sheaf_id(P) != sid:
                out.append(("id-mismatch", U, sid))
            if not is_sheaf(P.as_set):
                out.append(("not-a-sheaf", U, sid))
    if out:
        return out
    try:
        atlas._pullback_ids
    except AtlasError as exc:
        return [("restriction-closure", str(exc))]
    if check_fullness:
        for U in atlas.site.objects:
            for a in atlas.objects(U):
                for b in atlas.objects(U):
                    brute = _brute_isos(atlas.sheaves[U][a], atlas.sheaves[U][b])
                    if set(atlas.isos(U, a, b)) != brute:
                        out.append(("fullness", U, a, b))
    return out


def _brute_isos(P: GroupPresheaf, Q: GroupPresheaf) -> set:
    """Independent recount: product of sectionwise isomorphisms, filtered by naturality."""
    from itertools import product

    objs = P.site.objects
    scat = P.site.category
    per = [list(isomorphisms(P.groups[o], Q.groups[o])) for o in objs]
    out = set()
    for choice in product(*per):
        comps = dict(zip(objs, choice))
        if all(comps[s][P.restrict[m][g]] == Q.restrict[m][comps[t][g]]
               for m, (s, t) in scat.morphisms.items() for g in P.groups[t].elements):
            out.add(_encode_iso(comps, objs, P))
    return out


def atlas_inclusion(F: GroupSheafAtlas, F2: GroupSheafAtlas) -> TwoMap:
    """The inclusion F ⊂ F′ of a full sub-atlas."""
    A, B = F.two, F2.two
    for U in F.site.objects:
        missing = set(F.sheaves[U]) - set(F2.sheaves[U])
        if missing:
            raise AtlasError(f"{sort(missing)[0]} over {U} is not in the larger atlas")
    secs = A.sections
    return TwoMap(A, B, {U: {x: x for x in S.objects} for U, S in secs.items()},
                  {U: {c: c for c in S.one_cells} for U, S in secs.items()},
                  {U: {c: c for c in S.two_cells} for U, S in secs.items()})


def locally_isomorphic(atlas: GroupSheafAtlas, U: str, P: GroupPresheaf) -> Verdict:
    """Whether P on slice(U) is locally isomorphic to atlas objects: the sieve of φ with
    φ*P isomorphic to some atlas object over src(φ) must cover U."""
    site = atlas.site
    cat = site.category
    sieve = set()
    for phi in cat.into(U):
        V = cat.src(phi)
        Q = pullback_sheaf(P, site, U, phi)
        if any(sheaf_isomorphisms_exist(Q, atlas.sheaves[V][b]) for b in atlas.objects(V)):
            sieve.add(phi)
    if frozenset(sieve) in site.covering[U]:
        return Verdict(True)
    return Verdict(False, (U, tuple(sort(sieve))))


def sheaf_isomorphisms_exist(P: GroupPresheaf, Q: GroupPresheaf) -> bool:
    return next(_natural_isos(P, Q, P.site.objects), None) is not None


# ---------------------------------------------------------------- gerbes into atlases


def _aut_sheaf(G: GroupoidPresheaf, U, x):
    A = aut_presheaf(G, U, x)
    S, unit = sheafify_group(A)
    sid, C, rename = canonical_sheaf(S)
    return A, S, unit, sid, C, rename


def g_star(G: GroupoidPresheaf, atlas: GroupSheafAtlas = None) -> tuple[GroupSheafAtlas, dict]:
    """Atlas containing every automorphism sheaf of G, and ν: (U, x) -> sheaf id."""
    items = []
    nu = {}
    for U in G.site.objects:
        for x in sort(G.sections[U].objects):
            _, _, _, sid, C, _ = _aut_sheaf(G, U, x)
            nu[U, x] = sid
            items.append((U, C))
    base = atlas if atlas is not None else GroupSheafAtlas(G.site, {U: {} for U in G.site.objects})
    return saturate_atlas(base, items), nu


def conjugation_iso(G: GroupoidPresheaf, U, alpha) -> PresheafMap:
    """c_α: G_x -> G_y on slice(U), g ↦ αgα⁻¹ restricted to each slice object."""
    S = G.sections[U]
    x, y = S.src(alpha), S.tgt(alpha)
    A, B = aut_presheaf(G, U, x), aut_presheaf(G, U, y)
    cat = G.site.category
    comps = {}
    for psi in A.site.objects:
        T = G.sections[cat.src(psi)]
        a = G.res_arr(psi, alpha)
        ai = T.inv[a]
        comps[psi] = {g: T.comp[T.comp[a, g], ai] for g in A.groups[psi].elements}
    return PresheafMap(A.as_set, B.as_set, comps)


def canonical_cocycle(G: GroupoidPresheaf, atlas: GroupSheafAtlas = None):
    """F(G): R(G) -> atlas, sending x to its automorphism sheaf and α to conjugation by α."""
    from .groth import Cocycle

    v = is_gerbe(G)
    if not v:
        raise AtlasError(f"not a gerbe: {v.witness!r}")
    F, nu = g_star(G, atlas)
    R = resolution(G)
    T = F.two
    cat = G.site.category
    obj, one, two = {}, {}, {}
    for U in cat.objects:
        S = G.sections[U]
        info = {x: _aut_sheaf(G, U, x) for x in S.objects}
        objs_sl = F.slice_objects(U)
        obj[U] = {x: info[x][3] for x in S.objects}
        one[U] = {}
        for alpha in S.arrows:
            x, y = S.src(alpha), S.tgt(alpha)
            Ax, Sx, _, sx, Cx, rx = info[x]
            Ay, Sy, _, sy, Cy, ry = info[y]
            m = sheafify_group_map(conjugation_iso(G, U, alpha), Ax, Ay)
            comps = tuple(tuple(ry[psi][m(psi, g)] for g in sort(Sx.groups[psi].elements)) for psi in objs_sl)
            one[U][alpha] = (sx, sy, comps)
        two[U] = {}
        idU = cat.identities[U]
        for (a, b) in R.sections[U].two_cells:
            y = S.tgt(a)
            _, _, unit_y, _, _, ry = info[y]
            k = ry[idU][unit_y(idU, S.comp[b, S.inv[a]])]
            two[U][a, b] = (one[U][a], k)
    K = TwoMap(R, T, obj, one, two)
    return Cocycle(R, K, F)
