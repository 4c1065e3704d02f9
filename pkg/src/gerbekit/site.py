"""Finite categories, sieves and Grothendieck topologies.

Morphism ids must not contain ``|``; slice sites use it as separator.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple

from ._util import sort, sortkey

__all__ = [
    "FiniteCategory",
    "Sieve",
    "FiniteSite",
    "Violation",
    "SiteError",
    "validate_site",
    "pullback_sieve",
    "slice_site",
    "all_sieves",
    "saturate",
    "trivial_site",
    "terminal_site",
    "poset_site",
    "open_cover_site",
    "group_site",
    "relabel_site",
]


class SiteError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteCategory:
    objects: tuple
    morphisms: Mapping[str, tuple[str, str]]  # id -> (source, target)
    identities: Mapping[str, str]
    compose: Mapping[tuple[str, str], str]  # (g, f) -> g∘f

    def src(self, f: str) -> str:
        return self.morphisms[f][0]

    def tgt(self, f: str) -> str:
        return self.morphisms[f][1]

    def comp(self, g: str, f: str) -> str:
        return self.compose[g, f]

    @cached_property
    def _into(self) -> dict:
        out: dict = {U: [] for U in self.objects}
        for f in sort(self.morphisms):
            out[self.tgt(f)].append(f)
        return {U: tuple(v) for U, v in out.items()}

    def into(self, U: str) -> tuple:
        """All morphisms with target U, sorted."""
        return self._into[U]

    def hom(self, V: str, U: str) -> tuple:
        return tuple(f for f in self.into(U) if self.src(f) == V)


class Sieve(NamedTuple):
    on: str
    members: frozenset


class Violation(NamedTuple):
    axiom: str
    witness: tuple

    def __str__(self) -> str:
        return f"{self.axiom}: {self.witness!r}"


@dataclass(frozen=True, eq=False)
class FiniteSite:
    category: FiniteCategory
    covering: Mapping[str, frozenset]  # object -> frozenset of member frozensets
    name: str = field(default="site", compare=False)

    @property
    def objects(self) -> tuple:
        return self.category.objects

    def covers(self, U: str, members: Iterable[str]) -> bool:
        return frozenset(members) in self.covering[U]

    def maximal(self, U: str) -> frozenset:
        return frozenset(self.category.into(U))

    def pullback(self, members: frozenset, phi: str) -> frozenset:
        cat = self.category
        return frozenset(g for g in cat.into(cat.src(phi)) if cat.comp(phi, g) in members)

    @cached_property
    def _min_cover(self) -> dict:
        out = {}
        for U in self.objects:
            sieves = self.covering[U]
            if not sieves:
                raise SiteError(f"no covering sieve on {U}")
            inter = frozenset.intersection(*sieves)
            if inter not in sieves:
                raise SiteError(f"covering sieves on {U} not closed under intersection")
            out[U] = inter
        return out

    def min_cover(self, U: str) -> frozenset:
        """The smallest covering sieve on U (covering sets are finite and meet-closed)."""
        return self._min_cover[U]

    def slice(self, U: str) -> "FiniteSite":
        return slice_site(self, U)


def is_sieve(cat: FiniteCategory, U: str, members: frozenset):
    """Return None if closed under precomposition, else a witness (f, g)."""
    for f in sort(members):
        if cat.tgt(f) != U:
            return (f, None)
        for g in cat.into(cat.src(f)):
            if cat.comp(f, g) not in members:
                return (f, g)
    return None


def all_sieves(cat: FiniteCategory, U: str) -> list[frozenset]:
    """Every sieve on U; generated as downward closures of subsets of generators."""
    into = cat.into(U)
    closures = {}
    for f in into:
        closures[f] = frozenset(cat.comp(f, g) for g in cat.into(cat.src(f)))
    found = {frozenset()}
    frontier = [frozenset()]
    while frontier:
        nxt = []
        for s in frontier:
            for f in into:
                if f not in s:
                    t = s | closures[f]
                    if t not in found:
                        found.add(t)
                        nxt.append(t)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), sort(s)))


def saturate(cat: FiniteCategory, covering: Mapping[str, Iterable[Iterable[str]]]) -> dict:
    """Close each covering family upward among sieves."""
    out = {}
    for U in cat.objects:
        given = [frozenset(s) for s in covering.get(U, ())]
        out[U] = frozenset(s for s in all_sieves(cat, U) if any(g <= s for g in given))
    return out


def pullback_sieve(site: FiniteSite, R: Sieve, phi: str) -> Sieve:
    cat = site.category
    if phi not in cat.morphisms:
        raise SiteError(f"unknown morphism {phi}")
    if cat.tgt(phi) != R.on:
        raise SiteError(f"{phi} does not land in {R.on}")
    return Sieve(cat.src(phi), site.pullback(R.members, phi))


def _category_violations(cat: FiniteCategory) -> list[Violation]:
    out = []
    for U in cat.objects:
        i = cat.identities.get(U)
        if i is None or cat.morphisms.get(i) != (U, U):
            out.append(Violation("identity", (U,)))
    if out:
        return out
    ms = sort(cat.morphisms)
    for f in ms:
        for g in cat.into(cat.src(f)):
            h = cat.compose.get((f, g))
            if h is None:
                out.append(Violation("composition-missing", (f, g)))
            elif cat.morphisms.get(h) != (cat.src(g), cat.tgt(f)):
                out.append(Violation("composition-type", (f, g, h)))
    if out:
        return out
    for f in ms:
        if cat.comp(f, cat.identities[cat.src(f)]) != f or cat.comp(cat.identities[cat.tgt(f)], f) != f:
            out.append(Violation("unit", (f,)))
    for f in ms:
        for g in cat.into(cat.src(f)):
            for h in cat.into(cat.src(g)):
                if cat.comp(cat.comp(f, g), h) != cat.comp(f, cat.comp(g, h)):
                    out.append(Violation("associativity", (f, g, h)))
    return out


def validate_site(site: FiniteSite) -> list[Violation]:
    """All violated category/topology axioms, each with a witness; empty means valid."""
    cat = site.category
    out = _category_violations(cat)
    if out:
        return out
    for U in cat.objects:
        if U not in site.covering:
            out.append(Violation("covering-missing", (U,)))
            continue
        for R in sorted(site.covering[U], key=lambda s: sort(s)):
            w = is_sieve(cat, U, R)
            if w is not None:
                out.append(Violation("sieve-closure", (U, tuple(sort(R)), w)))
    if out:
        return out
    for U in cat.objects:
        if site.maximal(U) not in site.covering[U]:
            out.append(Violation("maximal", (U,)))
    for U in cat.objects:
        for R in sorted(site.covering[U], key=lambda s: (len(s), sort(s))):
            for phi in cat.into(U):
                pb = site.pullback(R, phi)
                if pb not in site.covering[cat.src(phi)]:
                    out.append(Violation("stability", (U, tuple(sort(R)), phi)))
    for U in cat.objects:
        covering = site.covering[U]
        for S in all_sieves(cat, U):
            if S in covering:
                continue
            for R in covering:
                if all(site.pullback(S, phi) in site.covering[cat.src(phi)] for phi in R):
                    out.append(Violation("transitivity", (U, tuple(sort(S)), tuple(sort(R)))))
                    break
    return out


def slice_site(site: FiniteSite, U: str) -> FiniteSite:
    """The site C/U: objects are morphisms into U, a morphism ψh -> ψ is ``h|ψ``."""
    key = (id(site), U)
    hit = _SLICES.get(key)
    if hit is not None and hit[0] is site:
        return hit[1]
    cat = site.category
    objects = cat.into(U)
    morphisms = {}
    identities = {}
    for psi in objects:
        V = cat.src(psi)
        identities[psi] = f"{cat.identities[V]}|{psi}"
        for h in cat.into(V):
            morphisms[f"{h}|{psi}"] = (cat.comp(psi, h), psi)
    compose = {}
    for psi in objects:
        V = cat.src(psi)
        for h1 in cat.into(V):
            mid = cat.comp(psi, h1)
            for h2 in cat.into(cat.src(h1)):
                compose[f"{h1}|{psi}", f"{h2}|{mid}"] = f"{cat.comp(h1, h2)}|{psi}"
    scat = FiniteCategory(objects, morphisms, identities, compose)
    covering = {
        psi: frozenset(frozenset(f"{h}|{psi}" for h in R) for R in site.covering[cat.src(psi)])
        for psi in objects
    }
    out = FiniteSite(scat, covering, name=f"{site.name}/{U}")
    _SLICES[key] = (site, out)
    return out


_SLICES: dict = {}


def slice_base(member: str) -> str:
    """Base morphism h of a slice morphism ``h|ψ``."""
    return member.rsplit("|", 1)[0]


# ---------------------------------------------------------------- builders


def _category_from_preorder(objects, leq) -> FiniteCategory:
    morphisms, identities, compose = {}, {}, {}
    for V in objects:
        for U in objects:
            if leq(V, U):
                morphisms[f"{V}->{U}"] = (V, U)
        identities[V] = f"{V}->{V}"
    for (V, U) in morphisms.values():
        for (W, V2) in morphisms.values():
            if V2 == V:
                compose[f"{V}->{U}", f"{W}->{V}"] = f"{W}->{U}"
    return FiniteCategory(tuple(objects), morphisms, identities, compose)


def trivial_site(cat: FiniteCategory, name: str = "trivial") -> FiniteSite:
    """Only maximal sieves cover."""
    return FiniteSite(cat, {U: frozenset([frozenset(cat.into(U))]) for U in cat.objects}, name)


def terminal_site() -> FiniteSite:
    cat = FiniteCategory(("*",), {"1": ("*", "*")}, {"*": "1"}, {("1", "1"): "1"})
    return trivial_site(cat, "terminal")


def poset_site(elements: Iterable[str], leq, name: str = "poset") -> FiniteSite:
    """A preorder with the trivial topology."""
    return trivial_site(_category_from_preorder(list(elements), leq), name)


def open_cover_site(opens: Mapping[str, Iterable[str]], name: str = "opens") -> FiniteSite:
    """Poset of open sets under inclusion; a sieve covers U iff its sources union to U."""
    pts = {k: frozenset(v) for k, v in opens.items()}
    objects = sorted(pts, key=lambda k: (len(pts[k]), sortkey(k)))
    cat = _category_from_preorder(objects, lambda V, U: pts[V] <= pts[U])
    covering = {}
    for U in objects:
        covering[U] = frozenset(
            S for S in all_sieves(cat, U)
            if frozenset().union(*(pts[cat.src(f)] for f in S)) == pts[U]
        )
    return FiniteSite(cat, covering, name)


def group_site(group) -> FiniteSite:
    """One-object category on a finite group, trivial topology."""
    morphisms = {g: ("*", "*") for g in group.elements}
    compose = {(g, f): group.mul[g, f] for g in group.elements for f in group.elements}
    cat = FiniteCategory(("*",), morphisms, {"*": group.e}, compose)
    return trivial_site(cat, "group")


def sieve_generated(site: FiniteSite, U: str, gens: Iterable[str]) -> frozenset:
    cat = site.category
    return frozenset(cat.comp(f, g) for f in gens for g in cat.into(cat.src(f)))


def relabel_site(site: FiniteSite, seed: int) -> FiniteSite:
    """Same site with object and morphism ids replaced by a seeded random permutation of fresh names."""
    rng = random.Random(seed)
    cat = site.category
    objs = list(cat.objects)
    ms = sort(cat.morphisms)
    onames = [f"o{k}" for k in range(len(objs))]
    mnames = [f"m{k}" for k in range(len(ms))]
    rng.shuffle(onames)
    rng.shuffle(mnames)
    ro, rm = dict(zip(objs, onames)), dict(zip(ms, mnames))
    order = list(objs)
    rng.shuffle(order)
    new = FiniteCategory(
        tuple(ro[U] for U in order),
        {rm[f]: (ro[s], ro[t]) for f, (s, t) in cat.morphisms.items()},
        {ro[U]: rm[i] for U, i in cat.identities.items()},
        {(rm[g], rm[f]): rm[h] for (g, f), h in cat.compose.items()},
    )
    covering = {ro[U]: frozenset(frozenset(rm[f] for f in S) for S in site.covering[U]) for U in objs}
    return FiniteSite(new, covering, site.name)
