"""Cocycles with group values and their Grothendieck construction.

A cocycle supplies, for each object U of the site, a 2-groupoid A(U) and
group data:

* ``group(U, i)``: the group attached to the object i of A(U);
* ``act(U, α)``: the isomorphism group(U, i) -> group(U, j) for α: i -> j;
* ``conj(U, h)``: for a 2-cell h: α => β, the element k with
  ``act(U, β) = c_k ∘ act(U, α)``;
* ``restrict_elem(φ, U, j, f)``: restriction of f along φ: V -> U.

:class:`Cocycle` takes values in an atlas of sheaves (global sections give
the groups); :class:`PresheafCocycle` is the resolution of a gerbe with the
automorphism presheaves themselves as values.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from ._util import UnionFind, Verdict, sort
from .gpd import (
    GFunctor,
    Groupoid,
    GroupoidMap,
    GroupoidPresheaf,
    GroupPresheaf,
    aut_presheaf,
    is_gerbe,
    is_lwe,
    sheafify_group,
    sheafify_group_map,
)
from .groups import FiniteGroup
from .presheaf import PresheafMap
from .site import slice_site
from .two_gpd import (
    TwoGroupoid,
    TwoGroupoidPresheaf,
    TwoMap,
    interval_legs,
    interval_product,
    is_lwe2,
    pi_groupoid,
    resolution,
    to_point,
)

__all__ = [
    "GrothError",
    "Cocycle",
    "PresheafCocycle",
    "CocycleMorphism",
    "grothendieck",
    "projection",
    "well_definedness_failures",
    "law_failures",
    "psi",
    "presheaf_to_sheaf",
    "gamma",
    "induced_map",
    "omega",
    "cylinder",
    "homotopy_path",
    "retarget",
    "point_cocycle",
    "check_lemma10",
    "check_lemma13",
    "check_lemma16",
    "check_lemma17",
    "check_cor19",
]


class GrothError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Cocycle:
    """A span * <- A -> F with K: A -> F a map into an atlas."""

    A: TwoGroupoidPresheaf
    K: TwoMap
    atlas: object

    def group(self, U, i) -> FiniteGroup:
        return self.atlas.global_group(U, self.K.obj[U][i])

    def act(self, U, alpha) -> dict:
        f = self.K.one[U][alpha]
        G = self.atlas.global_group(U, f[0])
        idx = self.atlas.id_index(U)
        return {g: f[2][idx][int(g)] for g in G.elements}

    def conj(self, U, h):
        return self.K.two[U][h][1]

    def restrict_elem(self, phi, U, j, f):
        return self.atlas.restrict_global(U, self.K.obj[U][j], phi, f)

    def violations(self) -> list:
        out = [("map",) + v for v in self.K.violations()]
        if out:
            return out
        v = is_lwe2(to_point(self.A))
        if not v:
            out.append(("source-leg", v.witness))
        return out


@dataclass(frozen=True, eq=False)
class PresheafCocycle:
    """R(G) with values the automorphism groups of G itself."""

    G: GroupoidPresheaf

    @cached_property
    def A(self) -> TwoGroupoidPresheaf:
        return resolution(self.G)

    def group(self, U, i) -> FiniteGroup:
        return self.G.sections[U].vertex_group(i)

    def act(self, U, alpha) -> dict:
        S = self.G.sections[U]
        ai = S.inv[alpha]
        return {g: S.comp[S.comp[alpha, g], ai] for g in S.hom(S.src(alpha), S.src(alpha))}

    def conj(self, U, h):
        S = self.G.sections[U]
        a, b = h
        return S.comp[b, S.inv[a]]

    def restrict_elem(self, phi, U, j, f):
        return self.G.res_arr(phi, f)


def point_cocycle(atlas, obj: Mapping[str, str]) -> Cocycle:
    """A = * with K(*) the compatible family ``obj`` of atlas objects."""
    from .two_gpd import constant_two_presheaf

    site = atlas.site
    pt = TwoGroupoid.from_tables(("*",), {"1": ("*", "*")}, {"1": ("1", "1")}, {("1", "1"): "1"}, {"*": "1"},
                                 {"1": "1"}, {("1", "1"): "1"}, {"1": "1"}, {"1": "1"}, {("1", "1"): "1"})
    A = constant_two_presheaf(site, pt)
    T = atlas.two
    one = {U: {"1": T.sections[U].ident1(obj[U])} for U in site.objects}
    two = {U: {"1": T.sections[U].ident2(one[U]["1"])} for U in site.objects}
    return Cocycle(A, TwoMap(A, T, {U: {"*": obj[U]} for U in site.objects}, one, two), atlas)


def retarget(c: Cocycle, atlas) -> Cocycle:
    """The same cocycle viewed in a larger atlas (cells are compared by data)."""
    if atlas is c.atlas:
        return c
    T = atlas.two
    for U in c.A.site.objects:
        for x in c.K.obj[U].values():
            if x not in T.sections[U].objects:
                raise GrothError(f"{x} over {U} is missing from the target atlas")
    K = TwoMap(c.A, T, c.K.obj, c.K.one, c.K.two)
    return Cocycle(c.A, K, atlas)


# ---------------------------------------------------------------- the construction


def _pairs(c, U) -> list:
    S = c.A.sections[U]
    out = []
    for alpha in sort(S.one_cells):
        j = S.t1(alpha)
        for f in sort(c.group(U, j).elements):
            out.append((f, alpha))
    return out


def _class_map(c, U) -> dict:
    """Each pair (f, α) to the least member of its class."""
    S = c.A.sections[U]
    pairs = _pairs(c, U)
    uf = UnionFind(pairs)
    for h, (alpha, beta) in S.two_cells.items():
        G = c.group(U, S.t1(alpha))
        kinv = G.inv[c.conj(U, h)]
        for f in G.elements:
            uf.union((f, alpha), (G.mul[f, kinv], beta))
    reps: dict = {}
    for p in pairs:
        reps.setdefault(uf[p], p)
    return {p: reps[uf[p]] for p in pairs}


def _compose_pairs(c, U, g_beta, f_alpha):
    S = c.A.sections[U]
    g, beta = g_beta
    f, alpha = f_alpha
    G = c.group(U, S.t1(beta))
    return (G.mul[g, c.act(U, beta)[f]], S.comp1(beta, alpha))


@dataclass(frozen=True, eq=False)
class Grothendieck:
    cocycle: object
    E: GroupoidPresheaf
    classes: Mapping[str, Mapping]  # U -> pair -> canonical pair


_GROTH: dict = {}


def grothendieck(c) -> GroupoidPresheaf:
    """E_A K as a presheaf of groupoids; arrows are canonical pairs ``(f, α)``."""
    return _groth(c).E


def _groth(c) -> Grothendieck:
    hit = _GROTH.get(id(c))
    if hit is not None and hit[0] is c:
        return hit[1]
    A = c.A
    cat = A.site.category
    classes = {U: _class_map(c, U) for U in cat.objects}
    sections = {}
    for U in cat.objects:
        S = A.sections[U]
        cm = classes[U]
        reps = sort(set(cm.values()))
        arrows = {p: (S.s1(p[1]), S.t1(p[1])) for p in reps}
        comp = {}
        by_src: dict = {}
        for p in reps:
            by_src.setdefault(arrows[p][0], []).append(p)
        for p in reps:
            for q in by_src.get(arrows[p][1], ()):
                comp[q, p] = cm[_compose_pairs(c, U, q, p)]
        ident = {i: cm[(c.group(U, i).e, S.ident1(i))] for i in S.objects}
        inv = {}
        for (f, alpha) in reps:
            ai = S.inv1(alpha)
            G = c.group(U, S.t1(alpha))
            inv[f, alpha] = cm[(c.act(U, ai)[G.inv[f]], ai)]
        sections[U] = Groupoid(S.objects, arrows, comp, ident, inv)
    restrict = {}
    for phi, (V, U) in cat.morphisms.items():
        S = A.sections[U]
        cmV = classes[V]
        arr = {}
        for (f, alpha) in sections[U].arrows:
            j = S.t1(alpha)
            arr[f, alpha] = cmV[(c.restrict_elem(phi, U, j, f), A.r_one(phi, alpha))]
        restrict[phi] = GFunctor(dict(A.restrict[phi].obj), arr)
    E = GroupoidPresheaf(A.site, sections, restrict)
    out = Grothendieck(c, E, classes)
    _GROTH[id(c)] = (c, out)
    return out


def projection(c) -> GroupoidMap:
    """p: E_A K -> πA, [(f, α)] ↦ [α]."""
    E = grothendieck(c)
    P, eta = pi_groupoid(c.A)
    return GroupoidMap(
        E, P,
        {U: {i: i for i in S.objects} for U, S in E.sections.items()},
        {U: {p: eta.one[U][p[1]] for p in S.arrows} for U, S in E.sections.items()},
    )


def well_definedness_failures(c, limit: int = None) -> list:
    """Composite classes that depend on the chosen representatives (all pairs tried)."""
    g = _groth(c)
    out = []
    for U in c.A.site.objects:
        cm = g.classes[U]
        members: dict = {}
        for p, r in cm.items():
            members.setdefault(r, []).append(p)
        E = g.E.sections[U]
        n = 0
        for (p, q), r in E.comp.items():
            for pp in members[p]:
                for qq in members[q]:
                    n += 1
                    if limit is not None and n > limit:
                        break
                    if cm[_compose_pairs(c, U, pp, qq)] != r:
                        out.append((U, pp, qq))
    return out


def law_failures(c) -> list:
    """Groupoid laws of E_A K, plus the stated inverse formula, section by section."""
    E = grothendieck(c)
    out = list(E.violations())
    return out


# ---------------------------------------------------------------- comparison maps


def psi(G: GroupoidPresheaf) -> GroupoidMap:
    """ψ: E_{R(G)} G -> G, identity on objects and [(f, α)] ↦ f∘α."""
    c = PresheafCocycle(G)
    E = grothendieck(c)
    arr = {}
    for U, S in E.sections.items():
        T = G.sections[U]
        arr[U] = {(f, alpha): T.comp[f, alpha] for (f, alpha) in S.arrows}
    return GroupoidMap(E, G, {U: {x: x for x in S.objects} for U, S in E.sections.items()}, arr)


def presheaf_to_sheaf(G: GroupoidPresheaf, sheaf_cocycle: Cocycle) -> GroupoidMap:
    """E for the automorphism presheaves -> E for their sheafifications, via the units."""
    from .atlas import _aut_sheaf

    c = PresheafCocycle(G)
    g = _groth(c)
    h = _groth(sheaf_cocycle)
    cat = G.site.category
    arr = {}
    for U in cat.objects:
        idU = cat.identities[U]
        m = {}
        for (f, alpha) in g.E.sections[U].arrows:
            y = G.sections[U].tgt(alpha)
            _, _, unit, _, _, rename = _aut_sheaf(G, U, y)
            m[f, alpha] = h.classes[U][(rename[idU][unit(idU, f)], alpha)]
        arr[U] = m
    return GroupoidMap(g.E, h.E, {U: {x: x for x in S.objects} for U, S in g.E.sections.items()}, arr)


def _source_presheaf(c, U, i) -> GroupPresheaf:
    A = c.A
    cat = A.site.category
    sl = slice_site(A.site, U)
    groups = {psi_: c.group(cat.src(psi_), A.r_obj(psi_, i)) for psi_ in sl.objects}
    restrict = {}
    for m, (src, tgt) in sl.category.morphisms.items():
        h = m.rsplit("|", 1)[0]
        V = cat.src(tgt)
        j = A.r_obj(tgt, i)
        restrict[m] = {f: c.restrict_elem(h, V, j, f) for f in groups[tgt].elements}
    return GroupPresheaf(sl, groups, restrict)


_GAMMA: dict = {}


def gamma(c, U, i) -> tuple[PresheafMap, GroupPresheaf, GroupPresheaf]:
    """γ_i: K(i) -> hom(i, i) on the slice over U, f ↦ [(f, 1)]; returns (map, source, target)."""
    key = (id(c), U, i)
    hit = _GAMMA.get(key)
    if hit is not None and hit[0] is c:
        return hit[1]
    g = _groth(c)
    src = _source_presheaf(c, U, i)
    tgt = aut_presheaf(g.E, U, i)
    cat = c.A.site.category
    comps = {}
    for psi_ in src.site.objects:
        V = cat.src(psi_)
        x = c.A.r_obj(psi_, i)
        one = c.A.sections[V].ident1(x)
        comps[psi_] = {f: g.classes[V][(f, one)] for f in src.groups[psi_].elements}
    out = (PresheafMap(src.as_set, tgt.as_set, comps), src, tgt)
    _GAMMA[key] = (c, out)
    return out


@dataclass(frozen=True, eq=False)
class CocycleMorphism:
    """θ: A -> A′ with K′θ = K on the nose."""

    source: object
    target: object
    theta: TwoMap

    def violations(self) -> list:
        out = [("theta",) + v for v in self.theta.violations()]
        if out:
            return out
        c, d = self.source, self.target
        if getattr(c, "atlas", None) is not getattr(d, "atlas", None):
            return [("atlas-mismatch",)]
        for U in c.A.site.objects:
            th = self.theta
            if any(d.K.obj[U][th.obj[U][x]] != y for x, y in c.K.obj[U].items()):
                out.append(("triangle-object", U))
            if any(d.K.one[U][th.one[U][a]] != b for a, b in c.K.one[U].items()):
                out.append(("triangle-one", U))
            if any(d.K.two[U][th.two[U][a]] != b for a, b in c.K.two[U].items()):
                out.append(("triangle-two", U))
        return out


def induced_map(m: CocycleMorphism) -> tuple[GroupoidMap, Verdict]:
    """(x, i) ↦ (x, θi), [(f, α)] ↦ [(f, θα)], with its local weak equivalence verdict."""
    g, h = _groth(m.source), _groth(m.target)
    th = m.theta
    arr = {}
    for U, S in g.E.sections.items():
        arr[U] = {(f, alpha): h.classes[U][(f, th.one[U][alpha])] for (f, alpha) in S.arrows}
    fmap = GroupoidMap(g.E, h.E, {U: dict(th.obj[U]) for U in th.obj}, arr)
    return fmap, is_lwe(fmap)


def omega(c) -> TwoMap:
    """ω: A -> R(E_A K), identity on objects, α ↦ [(e, α)]."""
    g = _groth(c)
    R = resolution(g.E)
    A = c.A
    one, two = {}, {}
    for U, S in A.sections.items():
        cm = g.classes[U]
        one[U] = {a: cm[(c.group(U, S.t1(a)).e, a)] for a in S.one_cells}
        two[U] = {h: (one[U][a], one[U][b]) for h, (a, b) in S.two_cells.items()}
    return TwoMap(A, R, {U: {x: x for x in S.objects} for U, S in A.sections.items()}, one, two)


# ---------------------------------------------------------------- homotopies


def cylinder(c0: Cocycle, c1: Cocycle, u: Mapping[str, Mapping]) -> tuple[Cocycle, CocycleMorphism, CocycleMorphism]:
    """The cocycle on A × 1 joining c0 and c1 along 1-cells ``u[U][i]: K0(i) -> K1(i)``.

    Returns the cylinder cocycle and the two end inclusions as cocycle morphisms.
    Every leg is checked; a non-natural ``u`` raises.
    """
    if c0.A is not c1.A or c0.atlas is not c1.atlas:
        raise GrothError("cylinder ends must share the 2-groupoid and the atlas")
    A = c0.A
    AI = interval_product(A)
    T = c0.atlas.two
    K0, K1 = c0.K, c1.K
    obj, one, two = {}, {}, {}
    for U, S in A.sections.items():
        F = T.sections[U]
        uU = u[U]
        uinv = {i: F.inv1(uU[i]) for i in S.objects}
        obj[U] = {}
        for i in S.objects:
            obj[U][i, "0"] = K0.obj[U][i]
            obj[U][i, "1"] = K1.obj[U][i]
        one[U] = {}
        for a, (i, j) in S.one_cells.items():
            one[U][a, "00"] = K0.one[U][a]
            one[U][a, "11"] = K1.one[U][a]
            one[U][a, "01"] = F.comp1(uU[j], K0.one[U][a])
            one[U][a, "10"] = F.comp1(K0.one[U][a], uinv[i])
        two[U] = {}
        for h, (a, b) in S.two_cells.items():
            i, j = S.one_cells[a]
            two[U][h, "00"] = K0.two[U][h]
            two[U][h, "11"] = K1.two[U][h]
            two[U][h, "01"] = F.hcomp(F.ident2(uU[j]), K0.two[U][h])
            two[U][h, "10"] = F.hcomp(K0.two[U][h], F.ident2(uinv[i]))
    KI = TwoMap(AI, T, obj, one, two)
    v = KI.violations()
    if v:
        raise GrothError(f"homotopy data is not natural: {v[0]!r}")
    cyl = Cocycle(AI, KI, c0.atlas)
    i0, i1 = interval_legs(A, AI)
    m0, m1 = CocycleMorphism(c0, cyl, i0), CocycleMorphism(c1, cyl, i1)
    for m in (m0, m1):
        w = m.violations()
        if w:
            raise GrothError(f"cylinder leg fails: {w[0]!r}")
    return cyl, m0, m1


def _gamma_iso(c: Cocycle, F, U, i, target_sid) -> tuple:
    """Γ_i: K(i) -> (E_A K)~_i as an atlas 1-cell: rename ∘ sheafify(γ_i) ∘ unit."""
    from .atlas import _aut_sheaf

    E = grothendieck(c)
    gm, src, _ = gamma(c, U, i)
    A_i, S_i, _, sid, C, rename = _aut_sheaf(E, U, i)
    if sid != target_sid:
        raise GrothError("automorphism sheaf mismatch")
    S_src, unit_src = sheafify_group(src)
    sm = sheafify_group_map(gm, src, A_i)
    comps = []
    for psi_ in F.slice_objects(U):
        comps.append(tuple(rename[psi_][sm(psi_, unit_src(psi_, g))] for g in src.groups[psi_].elements))
    return (c.K.obj[U][i], sid, tuple(comps))


def homotopy_path(c: Cocycle) -> list:
    """Zig-zag from c to F(E_A K) in the cocycle category.

    Returns ``[(morphism, direction)]`` where direction "+" means the
    morphism points away from c along the path. The atlas is enlarged to hold
    the automorphism sheaves of E_A K; the start is c retargeted there.
    """
    from .atlas import canonical_cocycle, g_star

    E = grothendieck(c)
    F2, _ = g_star(E, c.atlas)
    c2 = retarget(c, F2)
    FE = canonical_cocycle(E, F2)
    if FE.atlas is not F2:
        raise GrothError("atlas not saturated for the automorphism sheaves")
    w = omega(c2)
    comp = TwoMap(c2.A, F2.two,
                  {U: {x: FE.K.obj[U][y] for x, y in w.obj[U].items()} for U in w.obj},
                  {U: {a: FE.K.one[U][b] for a, b in w.one[U].items()} for U in w.one},
                  {U: {a: FE.K.two[U][b] for a, b in w.two[U].items()} for U in w.two})
    c_omega = Cocycle(c2.A, comp, F2)
    u = {U: {i: _gamma_iso(c2, F2, U, i, comp.obj[U][i]) for i in S.objects} for U, S in c2.A.sections.items()}
    _, m0, m1 = cylinder(c2, c_omega, u)
    m2 = CocycleMorphism(c_omega, FE, w)
    v = m2.violations()
    if v:
        raise GrothError(f"ω is not a cocycle morphism: {v[0]!r}")
    return [(m0, "+"), (m1, "-"), (m2, "+")]


# ---------------------------------------------------------------- per-instance checks


def check_lemma10(c) -> Verdict:
    """Composition is independent of representatives and E_A K satisfies the groupoid laws."""
    wd = well_definedness_failures(c)
    if wd:
        return Verdict(False, ("representatives", wd[0]))
    laws = law_failures(c)
    if laws:
        return Verdict(False, ("laws", laws[0]))
    return Verdict(True)


def check_lemma13(G: GroupoidPresheaf) -> Verdict:
    """ψ is a sectionwise bijective homomorphism over the projections to πR(G)."""
    m = psi(G)
    v = m.violations()
    if v:
        return Verdict(False, ("functor", v[0]))
    for U in sort(m.arr):
        comp = m.arr[U]
        if len(set(comp.values())) != len(comp) or set(comp.values()) != set(G.sections[U].arrows):
            return Verdict(False, ("bijective", U))
    c = PresheafCocycle(G)
    p = projection(c)
    _, eta = pi_groupoid(c.A)
    for U in sort(m.arr):
        for a, f in m.arr[U].items():
            if eta.one[U][f] != p.arr[U][a]:
                return Verdict(False, ("projection", U, a))
    return Verdict(True)


def check_lemma16(c) -> Verdict:
    return is_gerbe(grothendieck(c))


def check_lemma17(c, U, i) -> Verdict:
    """Sheafified γ_i is an isomorphism; the witness lists the sheafified group orders."""
    m, src, tgt = gamma(c, U, i)
    s = sheafify_group_map(m, src, tgt)
    for V in sort(s.components):
        comp = s.components[V]
        if len(set(comp.values())) != len(comp) or set(comp.values()) != set(s.target.sections[V]):
            return Verdict(False, (U, i, V))
    return Verdict(True, {V: len(s.target.sections[V]) for V in sort(s.components)})


def check_cor19(c) -> Verdict:
    """Every morphism on the homotopy path of c induces a local weak equivalence."""
    for k, (m, _) in enumerate(homotopy_path(c)):
        _, v = induced_map(m)
        if not v:
            return Verdict(False, (k, v.witness))
    return Verdict(True)
