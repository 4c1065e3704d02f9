"""Presheaves of finite sets, local epi/mono tests and sheafification.

Every site here has finitely many covering sieves per object and they are
closed under intersection, so the colimit defining the plus construction is
attained at the minimal covering sieve. An element of ``X⁺(U)`` is therefore
stored as the unique matching family on ``site.min_cover(U)``: a tuple of
``(member, value)`` pairs in member order. That family is the canonical
representative of its refinement class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Mapping

from ._util import Verdict, debug_enabled, sort
from .site import FiniteSite

__all__ = [
    "SetPresheaf",
    "PresheafMap",
    "PresheafError",
    "presheaf_violations",
    "map_violations",
    "matching_families",
    "plus",
    "plus_map",
    "sheafify",
    "sheafify_map",
    "is_sheaf",
    "is_local_epi",
    "is_local_mono",
    "is_local_iso",
    "is_bijective",
    "constant_presheaf",
    "terminal_presheaf",
    "identity_map",
    "compose_maps",
]


class PresheafError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SetPresheaf:
    site: FiniteSite
    sections: Mapping[str, tuple]
    restrict: Mapping[str, Mapping[Hashable, Hashable]]  # φ: V->U gives X(U) -> X(V)

    def res(self, phi: str, x):
        return self.restrict[phi][x]


@dataclass(frozen=True, eq=False)
class PresheafMap:
    source: SetPresheaf
    target: SetPresheaf
    components: Mapping[str, Mapping[Hashable, Hashable]]

    def __call__(self, U: str, x):
        return self.components[U][x]


def presheaf_violations(X: SetPresheaf) -> list[tuple]:
    cat = X.site.category
    out = []
    for U in cat.objects:
        if len(set(X.sections[U])) != len(X.sections[U]):
            out.append(("duplicate-element", U))
        ident = X.restrict[cat.identities[U]]
        if any(ident.get(x, object()) != x for x in X.sections[U]):
            out.append(("identity", U))
    for f in sort(cat.morphisms):
        V, U = cat.morphisms[f]
        table = X.restrict.get(f, {})
        target = set(X.sections[V])
        for x in X.sections[U]:
            if table.get(x, object()) not in target:
                out.append(("restriction-range", f, x))
    if out:
        return out
    for f in sort(cat.morphisms):
        for g in cat.into(cat.src(f)):
            fg = cat.comp(f, g)
            for x in X.sections[cat.tgt(f)]:
                if X.res(fg, x) != X.res(g, X.res(f, x)):
                    out.append(("functoriality", f, g, x))
    return out


def map_violations(p: PresheafMap) -> list[tuple]:
    X, Y = p.source, p.target
    cat = X.site.category
    out = []
    for U in cat.objects:
        target = set(Y.sections[U])
        for x in X.sections[U]:
            if p.components[U].get(x, object()) not in target:
                out.append(("range", U, x))
    if out:
        return out
    for f in sort(cat.morphisms):
        V, U = cat.morphisms[f]
        for x in X.sections[U]:
            if p(V, X.res(f, x)) != Y.res(f, p(U, x)):
                out.append(("naturality", f, x))
    return out


def identity_map(X: SetPresheaf) -> PresheafMap:
    return PresheafMap(X, X, {U: {x: x for x in X.sections[U]} for U in X.sections})


def compose_maps(q: PresheafMap, p: PresheafMap) -> PresheafMap:
    return PresheafMap(
        p.source,
        q.target,
        {U: {x: q(U, y) for x, y in p.components[U].items()} for U in p.components},
    )


def constant_presheaf(site: FiniteSite, elements, empty_over=()) -> SetPresheaf:
    """Constant presheaf, with empty sections over the objects in ``empty_over``.

    An empty section over V forces empty sections over every U with a map V -> U.
    """
    cat = site.category
    sections = {U: () if U in empty_over else tuple(elements) for U in cat.objects}
    restrict = {}
    for f, (V, U) in cat.morphisms.items():
        if V in empty_over and U not in empty_over and elements:
            raise PresheafError(f"no restriction along {f} into an empty section")
        restrict[f] = {x: x for x in sections[U]}
    return SetPresheaf(site, sections, restrict)


def terminal_presheaf(site: FiniteSite) -> SetPresheaf:
    return constant_presheaf(site, ("*",))


# ------------------------------------------------------------ matching families


def matching_families(X: SetPresheaf, members) -> list[tuple]:
    """All matching families of X on a sieve, as sorted ``(member, value)`` tuples."""
    cat = X.site.category
    order = sort(members)
    below = {f: [(g, cat.comp(f, g)) for g in cat.into(cat.src(f))] for f in order}
    assign: dict = {}
    out: list = []

    def place(f, val, trail) -> bool:
        for g, fg in below[f]:
            v = X.res(g, val)
            if fg in assign:
                if assign[fg] != v:
                    return False
            else:
                assign[fg] = v
                trail.append(fg)
        return True

    def rec(k: int):
        if k == len(order):
            out.append(tuple((f, assign[f]) for f in order))
            return
        f = order[k]
        if f in assign:
            rec(k + 1)
            return
        for val in X.sections[cat.src(f)]:
            trail: list = []
            if place(f, val, trail):
                rec(k + 1)
            for m in trail:
                del assign[m]

    rec(0)
    return out


def _restrict_family(site: FiniteSite, family: tuple, phi: str) -> tuple:
    cat = site.category
    vals = dict(family)
    V = cat.src(phi)
    return tuple((g, vals[cat.comp(phi, g)]) for g in sort(site.min_cover(V)))


_PLUS: dict = {}


def plus(X: SetPresheaf) -> tuple[SetPresheaf, PresheafMap]:
    """The plus construction with its unit map ``X -> X⁺``."""
    hit = _PLUS.get(id(X))
    if hit is not None and hit[0] is X:
        return hit[1]
    site = X.site
    cat = site.category
    sections = {U: tuple(matching_families(X, site.min_cover(U))) for U in cat.objects}
    restrict = {}
    for f, (V, U) in cat.morphisms.items():
        restrict[f] = {s: _restrict_family(site, s, f) for s in sections[U]}
    Xp = SetPresheaf(site, sections, restrict)
    unit = {}
    for U in cat.objects:
        members = sort(site.min_cover(U))
        unit[U] = {x: tuple((f, X.res(f, x)) for f in members) for x in X.sections[U]}
    out = (Xp, PresheafMap(X, Xp, unit))
    _PLUS[id(X)] = (X, out)
    return out


def plus_map(p: PresheafMap, source_plus: SetPresheaf = None, target_plus: SetPresheaf = None) -> PresheafMap:
    site = p.source.site
    cat = site.category
    Sp = source_plus if source_plus is not None else plus(p.source)[0]
    Tp = target_plus if target_plus is not None else plus(p.target)[0]
    comps = {}
    for U in cat.objects:
        comps[U] = {s: tuple((f, p(cat.src(f), v)) for f, v in s) for s in Sp.sections[U]}
    return PresheafMap(Sp, Tp, comps)


_SHEAFIFIED: dict = {}


def sheafify(X: SetPresheaf) -> tuple[SetPresheaf, PresheafMap]:
    """``X⁺⁺`` with the composite unit. Memoized per presheaf instance."""
    hit = _SHEAFIFIED.get(id(X))
    if hit is not None and hit[0] is X:
        return hit[1]
    X1, u1 = plus(X)
    X2, u2 = plus(X1)
    unit = compose_maps(u2, u1)
    if debug_enabled():
        v = is_sheaf(X2)
        if not v:
            raise PresheafError(f"sheafification failed the sheaf condition at {v.witness!r}")
    _SHEAFIFIED[id(X)] = (X, (X2, unit))
    return X2, unit


def sheafify_map(p: PresheafMap) -> PresheafMap:
    S1, _ = plus(p.source)
    T1, _ = plus(p.target)
    m1 = plus_map(p, S1, T1)
    return plus_map(m1, plus(S1)[0], plus(T1)[0])


def is_sheaf(X: SetPresheaf) -> Verdict:
    """Unique amalgamation for every covering sieve of every object."""
    site = X.site
    cat = site.category
    for U in cat.objects:
        for R in sorted(site.covering[U], key=lambda s: (len(s), sort(s))):
            members = sort(R)
            fams = matching_families(X, R)
            images = {tuple((f, X.res(f, x)) for f in members) for x in X.sections[U]}
            if len(images) != len(X.sections[U]) or images != set(fams):
                return Verdict(False, (U, tuple(members)))
    return Verdict(True)


# ------------------------------------------------------------ local properties


def _images(p: PresheafMap) -> dict:
    return {U: set(p.components[U].values()) for U in p.components}


def is_local_epi(p: PresheafMap) -> Verdict:
    """Every target section lies locally in the image; witness ``(U, y, sieve)``."""
    Y = p.target
    site = Y.site
    cat = site.category
    image = _images(p)
    for U in cat.objects:
        into = cat.into(U)
        for y in sort(Y.sections[U]):
            sieve = frozenset(f for f in into if Y.res(f, y) in image[cat.src(f)])
            if sieve not in site.covering[U]:
                return Verdict(False, (U, y, tuple(sort(sieve))))
    return Verdict(True)


def is_local_mono(p: PresheafMap) -> Verdict:
    """Sections with equal images agree locally; witness ``(U, x, x', sieve)``."""
    X = p.source
    site = X.site
    cat = site.category
    for U in cat.objects:
        into = cat.into(U)
        fibres: dict = {}
        for x in sort(X.sections[U]):
            fibres.setdefault(p(U, x), []).append(x)
        for xs in fibres.values():
            for i, x in enumerate(xs):
                for x2 in xs[i + 1:]:
                    sieve = frozenset(f for f in into if X.res(f, x) == X.res(f, x2))
                    if sieve not in site.covering[U]:
                        return Verdict(False, (U, x, x2, tuple(sort(sieve))))
    return Verdict(True)


def is_bijective(p: PresheafMap) -> Verdict:
    for U in sort(p.components):
        comp = p.components[U]
        if len(set(comp.values())) != len(comp) or set(comp.values()) != set(p.target.sections[U]):
            return Verdict(False, (U,))
    return Verdict(True)


def is_local_iso(p: PresheafMap, method: str = "sheafify") -> Verdict:
    """Local isomorphism.

    ``method="sheafify"`` tests that the sheafified map is a sectionwise
    bijection; ``"sieves"`` uses local epi and local mono; ``"both"`` runs
    the two and raises if they disagree.
    """
    if method == "sieves":
        e = is_local_epi(p)
        if not e:
            return Verdict(False, ("epi",) + e.witness)
        m = is_local_mono(p)
        return m if m else Verdict(False, ("mono",) + m.witness)
    v = is_bijective(sheafify_map(p))
    if method == "both":
        w = is_local_iso(p, "sieves")
        if bool(v) != bool(w):
            raise PresheafError(f"local-iso characterizations disagree: {v} vs {w}")
    return v


def map_from_function(X: SetPresheaf, Y: SetPresheaf, fn: Callable) -> PresheafMap:
    return PresheafMap(X, Y, {U: {x: fn(U, x) for x in X.sections[U]} for U in X.sections})
