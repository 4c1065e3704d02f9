"""Exhaustive, deterministic enumeration of small gerbes in normal form.

A section is a disjoint union of connected groupoids on objects
``"0".."k-1"``; a component of size s with vertex group H has arrows
``(y, h, x)`` for x, y in the component and h in H. Restriction functors are
all functors between these groupoids that compose correctly.
"""

from __future__ import annotations

from itertools import combinations_with_replacement, product
from typing import NamedTuple

from ._util import sort
from .gpd import GFunctor, Groupoid, GroupoidPresheaf, functors, is_gerbe
from .groups import FiniteGroup, catalog, homomorphisms, isomorphisms
from .presheaf import PresheafMap, SetPresheaf
from .site import FiniteSite
from .two_gpd import TwoFunctor, TwoGroupoid, TwoGroupoidPresheaf, crossed_module, discrete_two, resolution

__all__ = ["BudgetExceeded", "shapes", "shape_groupoid", "enumerate_gerbes", "enumerate_gerbes_indexed", "partitions",
           "enumerate_presheaves", "presheaf_maps", "enumerate_groupoid_presheaves",
           "CrossedModule", "crossed_modules", "crossed_module_maps", "enumerate_crossed_module_presheaves",
           "enumerate_two_groupoid_presheaves"]


class BudgetExceeded(RuntimeError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


def partitions(k: int, largest: int = None) -> list[tuple]:
    """Partitions of k as non-increasing tuples."""
    largest = k if largest is None else largest
    if k == 0:
        return [()]
    out = []
    for first in range(min(k, largest), 0, -1):
        for rest in partitions(k - first, first):
            out.append((first,) + rest)
    return out


def shapes(max_objects: int, groups: list[FiniteGroup]) -> list[tuple]:
    """Section shapes: tuples of ``(size, group index)``, sorted within equal sizes."""
    out = []
    for k in range(max_objects + 1):
        for part in partitions(k):
            per_size = {}
            for s in part:
                per_size[s] = per_size.get(s, 0) + 1
            options = [list(combinations_with_replacement(range(len(groups)), n)) for s, n in sorted(per_size.items(), reverse=True)]
            sizes = sorted(per_size.items(), reverse=True)
            for pick in product(*options):
                shape = []
                for (s, _), idxs in zip(sizes, pick):
                    shape += [(s, i) for i in idxs]
                out.append(tuple(shape))
    return out


def shape_groupoid(shape: tuple, groups: list[FiniteGroup]) -> Groupoid:
    objects, arrows, comp, ident, inv = [], {}, {}, {}, {}
    start = 0
    for size, gi in shape:
        G = groups[gi]
        objs = [str(start + j) for j in range(size)]
        start += size
        objects += objs
        for x in objs:
            ident[x] = (x, G.e, x)
            for y in objs:
                for h in G.elements:
                    arrows[(y, h, x)] = (x, y)
                    inv[(y, h, x)] = (x, G.inv[h], y)
                    for z in objs:
                        for g in G.elements:
                            comp[(z, g, y), (y, h, x)] = (z, G.mul[g, h], x)
    return Groupoid(tuple(objects), arrows, comp, ident, inv)


def _functors_ok(site: FiniteSite, sections: dict, chosen: dict, phi: str) -> bool:
    cat = site.category
    for (g, f), gf in cat.compose.items():
        if phi not in (g, f, gf):
            continue
        if not all(m in chosen for m in (g, f, gf)):
            continue
        rg, rf, rgf = chosen[g], chosen[f], chosen[gf]
        # restriction is contravariant: (g∘f)* = f* ∘ g*
        if any(rgf.obj[x] != rf.obj[rg.obj[x]] for x in sections[cat.tgt(g)].objects):
            return False
        if any(rgf.arr[a] != rf.arr[rg.arr[a]] for a in sections[cat.tgt(g)].arrows):
            return False
    return True


def enumerate_gerbes(site: FiniteSite, max_objects: int, max_order: int, budget: int = 100000,
                     group_filter=None, accept=None):
    """Yield gerbes in normal form within bounds.

    ``group_filter(U, H)`` may veto a vertex group over U; ``accept(G)`` is an
    extra predicate applied after the gerbe test. Raises BudgetExceeded when
    more than ``budget`` candidate presheaves would be examined.
    """
    for _, G in enumerate_gerbes_indexed(site, max_objects, max_order, budget, group_filter, accept):
        yield G


def enumerate_gerbes_indexed(site: FiniteSite, max_objects: int, max_order: int, budget: int = 100000,
                             group_filter=None, accept=None, shard: tuple = (0, 1), start: int = 0,
                             gerbes_only: bool = True):
    """As enumerate_gerbes, yielding ``(shape index, gerbe)`` for shapes with index ≡ r mod n.

    Merging the shards with a stable sort on the index reproduces the
    unsharded order, so parallel runs stay deterministic. ``start`` skips
    earlier shape indices; BudgetExceeded.partial holds ``{"resume": index}``
    for the shape that was interrupted.
    """
    if max_objects <= 0 or max_order <= 0:
        return
    r, n = shard
    groups = catalog(max_order)
    cat = site.category
    objs = list(cat.objects)
    per_U = {}
    for U in objs:
        opts = []
        for sh in shapes(max_objects, groups):
            if group_filter is not None and not all(group_filter(U, groups[i]) for _, i in sh):
                continue
            opts.append(sh)
        per_U[U] = opts
    morphs = [f for f in sort(cat.morphisms) if cat.identities[cat.src(f)] != f]
    seen = 0
    for idx, pick in enumerate(product(*(per_U[U] for U in objs))):
        if idx < start or idx % n != r:
            continue
        shape = dict(zip(objs, pick))
        sections = {U: shape_groupoid(shape[U], groups) for U in objs}
        if gerbes_only and any(not sections[U].objects for U in objs if not _may_be_empty(site, U, sections)):
            continue
        chosen = {}
        for U in objs:
            S = sections[U]
            chosen[cat.identities[U]] = GFunctor({x: x for x in S.objects}, {a: a for a in S.arrows})

        def rec(k):
            nonlocal seen
            if k == len(morphs):
                seen += 1
                if seen > budget:
                    raise BudgetExceeded(f"more than {budget} candidate presheaves", {"resume": idx})
                yield GroupoidPresheaf(site, sections, dict(chosen))
                return
            phi = morphs[k]
            V, U = cat.morphisms[phi]
            for F in functors(sections[U], sections[V]):
                chosen[phi] = F
                if _functors_ok(site, sections, chosen, phi):
                    yield from rec(k + 1)
                del chosen[phi]

        for G in rec(0):
            if (not gerbes_only or is_gerbe(G)) and (accept is None or accept(G)):
                yield idx, G


def enumerate_groupoid_presheaves(site: FiniteSite, max_objects: int, max_order: int, budget: int = 100000):
    """Every groupoid presheaf in normal form within bounds, gerbe or not."""
    for _, G in enumerate_gerbes_indexed(site, max_objects, max_order, budget, gerbes_only=False):
        yield G


def _may_be_empty(site: FiniteSite, U: str, sections: dict) -> bool:
    """An empty section is only possible if nonempty sections already cover U."""
    cat = site.category
    sieve = frozenset(f for f in cat.into(U) if sections[cat.src(f)].objects)
    return sieve in site.covering[U]


# ---------------------------------------------------------------- set presheaves


def _functorial(site: FiniteSite, restrict: dict, sections: dict, phi: str) -> bool:
    cat = site.category
    for (g, f), gf in cat.compose.items():
        if phi not in (g, f, gf) or not all(m in restrict for m in (g, f, gf)):
            continue
        rg, rf, rgf = restrict[g], restrict[f], restrict[gf]
        if any(rgf[x] != rf[rg[x]] for x in sections[cat.tgt(g)]):
            return False
    return True


def enumerate_presheaves(site: FiniteSite, max_size: int, budget: int = 100000):
    """Every presheaf of sets with sections ``"0".."k-1"`` for k ≤ max_size, in a fixed order."""
    cat = site.category
    objs = list(cat.objects)
    morphs = [f for f in sort(cat.morphisms) if cat.identities[cat.src(f)] != f]
    seen = 0
    for sizes in product(range(max_size + 1), repeat=len(objs)):
        sections = {U: tuple(str(k) for k in range(n)) for U, n in zip(objs, sizes)}
        restrict = {cat.identities[U]: {x: x for x in sections[U]} for U in objs}

        def rec(k):
            nonlocal seen
            if k == len(morphs):
                seen += 1
                if seen > budget:
                    raise BudgetExceeded(f"more than {budget} presheaves")
                yield SetPresheaf(site, sections, dict(restrict))
                return
            phi = morphs[k]
            V, U = cat.morphisms[phi]
            for image in product(sections[V], repeat=len(sections[U])):
                restrict[phi] = dict(zip(sections[U], image))
                if _functorial(site, restrict, sections, phi):
                    yield from rec(k + 1)
                del restrict[phi]

        yield from rec(0)


def presheaf_maps(X: SetPresheaf, Y: SetPresheaf):
    """All natural transformations X -> Y."""
    cat = X.site.category
    objs = list(cat.objects)

    def natural(comps):
        for f, (V, U) in cat.morphisms.items():
            if U in comps and V in comps:
                if any(comps[V][X.restrict[f][x]] != Y.restrict[f][comps[U][x]] for x in X.sections[U]):
                    return False
        return True

    def rec(k, comps):
        if k == len(objs):
            yield PresheafMap(X, Y, {U: dict(c) for U, c in comps.items()})
            return
        U = objs[k]
        for image in product(Y.sections[U], repeat=len(X.sections[U])):
            comps[U] = dict(zip(X.sections[U], image))
            if natural(comps):
                yield from rec(k + 1, comps)
            del comps[U]

    yield from rec(0, {})


# ---------------------------------------------------------------- 2-groupoid presheaves


class CrossedModule(NamedTuple):
    Q: FiniteGroup
    N: FiniteGroup
    boundary: dict  # N -> Q
    action: dict  # (q, n) -> q·n

    def two(self) -> TwoGroupoid:
        return crossed_module(self.Q, self.N, self.boundary, self.action)

    def violations(self) -> list:
        Q, N, d, act = self
        out = []
        for q in Q.elements:
            for n in N.elements:
                if d[act[q, n]] != Q.conj(q, d[n]):
                    out.append(("equivariance", q, n))
        for m in N.elements:
            for n in N.elements:
                if act[d[m], n] != N.conj(m, n):
                    out.append(("peiffer", m, n))
        return out


def _actions(Q: FiniteGroup, N: FiniteGroup) -> list[dict]:
    auts = [a for a in isomorphisms(N, N)]
    out = []
    for rho in product(range(len(auts)), repeat=len(Q.elements)):
        table = dict(zip(Q.elements, (auts[i] for i in rho)))
        if table[Q.e] != {n: n for n in N.elements}:
            continue
        if all(table[Q.mul[p, q]] == {n: table[p][table[q][n]] for n in N.elements}
               for p in Q.elements for q in Q.elements):
            out.append({(q, n): table[q][n] for q in Q.elements for n in N.elements})
    return out


def crossed_modules(max_order: int) -> list[CrossedModule]:
    """All crossed modules with both groups from the catalog up to max_order."""
    groups = catalog(max_order)
    out = []
    for Q in groups:
        for N in groups:
            for d in homomorphisms(N, Q):
                for act in _actions(Q, N):
                    cm = CrossedModule(Q, N, d, act)
                    if not cm.violations():
                        out.append(cm)
    return out


def crossed_module_maps(A: CrossedModule, B: CrossedModule) -> list[tuple[dict, dict]]:
    """Pairs (a: Q_A -> Q_B, b: N_A -> N_B) commuting with boundaries and actions."""
    out = []
    for a in homomorphisms(A.Q, B.Q):
        for b in homomorphisms(A.N, B.N):
            if any(B.boundary[b[n]] != a[A.boundary[n]] for n in A.N.elements):
                continue
            if any(b[A.action[q, n]] != B.action[a[q], b[n]] for q in A.Q.elements for n in A.N.elements):
                continue
            out.append((a, b))
    return out


def enumerate_crossed_module_presheaves(site: FiniteSite, max_order: int, budget: int = 100000):
    """One-object 2-groupoid presheaves: a crossed module per object, crossed-module maps as restrictions."""
    cat = site.category
    objs = list(cat.objects)
    morphs = [f for f in sort(cat.morphisms) if cat.identities[cat.src(f)] != f]
    cms = crossed_modules(max_order)
    twos = [cm.two() for cm in cms]
    seen = 0
    for pick in product(range(len(cms)), repeat=len(objs)):
        at = dict(zip(objs, pick))
        chosen = {}
        for U in objs:
            cm = cms[at[U]]
            chosen[cat.identities[U]] = ({q: q for q in cm.Q.elements}, {n: n for n in cm.N.elements})

        def ok(phi):
            for (g, f), gf in cat.compose.items():
                if phi not in (g, f, gf) or not all(m in chosen for m in (g, f, gf)):
                    continue
                (ag, bg), (af, bf), (agf, bgf) = chosen[g], chosen[f], chosen[gf]
                if any(agf[q] != af[ag[q]] for q in ag) or any(bgf[n] != bf[bg[n]] for n in bg):
                    return False
            return True

        def rec(k):
            nonlocal seen
            if k == len(morphs):
                seen += 1
                if seen > budget:
                    raise BudgetExceeded(f"more than {budget} crossed-module presheaves")
                restrict = {}
                for phi, (a, b) in chosen.items():
                    U = cat.tgt(phi)
                    cm = cms[at[U]]
                    restrict[phi] = TwoFunctor({"*": "*"}, dict(a),
                                               {(q, n): (a[q], b[n]) for q in cm.Q.elements for n in cm.N.elements})
                yield TwoGroupoidPresheaf(site, {U: twos[at[U]] for U in objs}, restrict)
                return
            phi = morphs[k]
            V, U = cat.morphisms[phi]
            for m in crossed_module_maps(cms[at[U]], cms[at[V]]):
                chosen[phi] = m
                if ok(phi):
                    yield from rec(k + 1)
                del chosen[phi]

        yield from rec(0)


def enumerate_two_groupoid_presheaves(site: FiniteSite, max_objects: int, max_order: int, budget: int = 100000):
    """The 2-groupoid corpus: crossed-module presheaves, plus resolutions and
    discrete 2-groupoids of every enumerated groupoid presheaf."""
    yield from enumerate_crossed_module_presheaves(site, max_order, budget)
    for G in enumerate_groupoid_presheaves(site, max_objects, max_order, budget):
        yield resolution(G)
        yield discrete_two(G)
