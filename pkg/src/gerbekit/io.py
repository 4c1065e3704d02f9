"""Versioned JSON interchange for sites, presheaves, groupoid and 2-groupoid
presheaves, atlases and cocycles.

Every document is an object with ``"format": "gerbekit"``, ``"version": 1``
and a ``"kind"``. Ids may be strings or nested lists; lists decode to tuples.
Sites, groups and atlases also accept short builder forms, e.g.
``{"builder": "open_cover", "opens": {...}}`` or ``{"group": "S3"}``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from ._util import sort
from .site import FiniteCategory, FiniteSite, open_cover_site, poset_site, saturate, terminal_site

FORMAT = "gerbekit"
VERSION = 1

__all__ = ["ParseError", "load", "loads", "dump", "dumps", "to_doc", "from_doc", "named_group"]


class ParseError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def _t(x):
    """JSON value -> hashable id (lists become tuples)."""
    if isinstance(x, list):
        return tuple(_t(e) for e in x)
    return x


def _j(x):
    if isinstance(x, tuple):
        return [_j(e) for e in x]
    return x


def _need(doc: dict, key: str, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(where, f"missing field {key!r}")
    return doc[key]


# ---------------------------------------------------------------- groups


def named_group(name: str):
    from .groups import cyclic, klein, symmetric3

    table = {"S3": symmetric3, "V4": klein}
    if name in table:
        return table[name]()
    if name.startswith("Z") and name[1:].isdigit():
        return cyclic(int(name[1:]))
    raise KeyError(name)


def _group_from(doc, where):
    from .groups import FiniteGroup

    if isinstance(doc, str):
        try:
            return named_group(doc)
        except KeyError:
            raise ParseError(where, f"unknown group {doc!r}") from None
    if "group" in doc and isinstance(doc["group"], str):
        return _group_from(doc["group"], where)
    els = tuple(_t(e) for e in _need(doc, "elements", where))
    mul = {}
    for k, row in enumerate(_need(doc, "mul", where)):
        if len(row) != 3:
            raise ParseError(f"{where}.mul[{k}]", "expected [a, b, a*b]")
        mul[_t(row[0]), _t(row[1])] = _t(row[2])
    try:
        return FiniteGroup.from_op(els, lambda a, b: mul[a, b], doc.get("name", ""))
    except (KeyError, StopIteration) as exc:
        raise ParseError(where, f"incomplete or non-group multiplication table ({exc})") from None


def _group_doc(G) -> dict:
    els = sort(G.elements)
    return {"elements": [_j(e) for e in els], "mul": [[_j(a), _j(b), _j(G.mul[a, b])] for a in els for b in els]}


# ---------------------------------------------------------------- sites


def _site_from(doc, where="site") -> FiniteSite:
    if isinstance(doc, str):
        return _site_from(_read(doc), doc)
    b = doc.get("builder")
    name = doc.get("name", b or "site")
    if b == "terminal":
        return terminal_site()
    if b == "open_cover":
        opens = _need(doc, "opens", where)
        return open_cover_site({k: list(v) for k, v in opens.items()}, name)
    if b == "poset":
        elems = list(_need(doc, "elements", where))
        rel = {tuple(p) for p in _need(doc, "leq", where)}
        closure = _preorder_closure(elems, rel)
        return poset_site(elems, lambda V, U: (V, U) in closure, name)
    if b is not None:
        raise ParseError(f"{where}.builder", f"unknown site builder {b!r}")
    objects = tuple(_need(doc, "objects", where))
    morphisms = {}
    for k, row in enumerate(_need(doc, "morphisms", where)):
        if len(row) != 3:
            raise ParseError(f"{where}.morphisms[{k}]", "expected [id, source, target]")
        morphisms[row[0]] = (row[1], row[2])
    identities = dict(_need(doc, "identities", where))
    compose = {}
    for k, row in enumerate(_need(doc, "compose", where)):
        if len(row) != 3:
            raise ParseError(f"{where}.compose[{k}]", "expected [g, f, g∘f]")
        compose[row[0], row[1]] = row[2]
    cat = FiniteCategory(objects, morphisms, identities, compose)
    cov = _need(doc, "covering", where)
    covering = {U: frozenset(frozenset(s) for s in cov.get(U, ())) for U in objects}
    if doc.get("saturate"):
        covering = saturate(cat, covering)
    return FiniteSite(cat, covering, name)


def _preorder_closure(elems, rel) -> set:
    out = {(x, x) for x in elems} | set(rel)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(out):
            for (c, d) in list(out):
                if b == c and (a, d) not in out:
                    out.add((a, d))
                    changed = True
    return out


def _site_doc(site: FiniteSite) -> dict:
    cat = site.category
    return {
        "name": site.name,
        "objects": list(cat.objects),
        "morphisms": [[f, *cat.morphisms[f]] for f in sort(cat.morphisms)],
        "identities": {U: cat.identities[U] for U in cat.objects},
        "compose": [[g, f, cat.compose[g, f]] for (g, f) in sorted(cat.compose)],
        "covering": {U: sorted(sorted(s) for s in site.covering[U]) for U in cat.objects},
    }


# ---------------------------------------------------------------- presheaves


def _pairs(rows, where) -> dict:
    out = {}
    for k, row in enumerate(rows):
        if len(row) != 2:
            raise ParseError(f"{where}[{k}]", "expected [from, to]")
        out[_t(row[0])] = _t(row[1])
    return out


def _presheaf_from(doc, where):
    from .presheaf import SetPresheaf

    site = _site_from(_need(doc, "site", where), f"{where}.site")
    secs = _need(doc, "sections", where)
    sections = {U: tuple(_t(x) for x in secs.get(U, ())) for U in site.objects}
    rs = _need(doc, "restrict", where)
    restrict = {}
    for f, (V, U) in site.category.morphisms.items():
        if f in rs:
            restrict[f] = _pairs(rs[f], f"{where}.restrict.{f}")
        elif f == site.category.identities[U]:
            restrict[f] = {x: x for x in sections[U]}
        else:
            raise ParseError(f"{where}.restrict", f"missing restriction for {f}")
    return SetPresheaf(site, sections, restrict)


def _presheaf_doc(X) -> dict:
    return {
        "site": _site_doc(X.site),
        "sections": {U: [_j(x) for x in sort(X.sections[U])] for U in X.site.objects},
        "restrict": {f: [[_j(a), _j(b)] for a, b in sorted(X.restrict[f].items(), key=lambda kv: sort([kv[0]]))]
                     for f in sort(X.restrict)},
    }


def _groupoid_from(doc, where):
    from .gpd import Groupoid

    objects = tuple(_t(x) for x in _need(doc, "objects", where))
    arrows = {}
    for k, row in enumerate(_need(doc, "arrows", where)):
        if len(row) != 3:
            raise ParseError(f"{where}.arrows[{k}]", "expected [id, source, target]")
        arrows[_t(row[0])] = (_t(row[1]), _t(row[2]))
    comp = {}
    for k, row in enumerate(_need(doc, "compose", where)):
        if len(row) != 3:
            raise ParseError(f"{where}.compose[{k}]", "expected [g, f, g∘f]")
        comp[_t(row[0]), _t(row[1])] = _t(row[2])
    ident = _pairs(_need(doc, "identity", where), f"{where}.identity")
    inv = _pairs(_need(doc, "inverse", where), f"{where}.inverse")
    return Groupoid(objects, arrows, comp, ident, inv)


def _groupoid_doc(S) -> dict:
    return {
        "objects": [_j(x) for x in sort(S.objects)],
        "arrows": [[_j(a), _j(S.arrows[a][0]), _j(S.arrows[a][1])] for a in sort(S.arrows)],
        "compose": [[_j(g), _j(f), _j(S.comp[g, f])] for (g, f) in sort(S.comp)],
        "identity": [[_j(x), _j(S.ident[x])] for x in sort(S.ident)],
        "inverse": [[_j(a), _j(S.inv[a])] for a in sort(S.inv)],
    }


def _gpd_presheaf_from(doc, where):
    from .gpd import GFunctor, GroupoidPresheaf, constant_group_presheaf

    site = _site_from(_need(doc, "site", where), f"{where}.site")
    if doc.get("builder") == "constant_group":
        G = _group_from(_need(doc, "group", where), f"{where}.group")
        return GroupoidPresheaf.from_group_presheaf(constant_group_presheaf(site, G))
    if doc.get("builder") is not None:
        raise ParseError(f"{where}.builder", f"unknown builder {doc['builder']!r}")
    secs = _need(doc, "sections", where)
    sections = {}
    for U in site.objects:
        sections[U] = _groupoid_from(_need(secs, U, f"{where}.sections"), f"{where}.sections.{U}")
    rs = _need(doc, "restrict", where)
    restrict = {}
    for f, (V, U) in site.category.morphisms.items():
        if f in rs:
            r = rs[f]
            restrict[f] = GFunctor(_pairs(_need(r, "objects", f"{where}.restrict.{f}"), f"{where}.restrict.{f}.objects"),
                                   _pairs(_need(r, "arrows", f"{where}.restrict.{f}"), f"{where}.restrict.{f}.arrows"))
        elif f == site.category.identities[U]:
            S = sections[U]
            restrict[f] = GFunctor({x: x for x in S.objects}, {a: a for a in S.arrows})
        else:
            raise ParseError(f"{where}.restrict", f"missing restriction for {f}")
    return GroupoidPresheaf(site, sections, restrict)


def _gpd_presheaf_doc(G) -> dict:
    return {
        "site": _site_doc(G.site),
        "sections": {U: _groupoid_doc(G.sections[U]) for U in G.site.objects},
        "restrict": {
            f: {"objects": [[_j(a), _j(b)] for a, b in sorted(F.obj.items(), key=lambda kv: sort([kv[0]]))],
                "arrows": [[_j(a), _j(b)] for a, b in sorted(F.arr.items(), key=lambda kv: sort([kv[0]]))]}
            for f, F in sorted(G.restrict.items())
        },
    }


def _two_from(doc, where):
    from .two_gpd import TwoGroupoid

    objects = tuple(_t(x) for x in _need(doc, "objects", where))
    ones = {}
    for k, row in enumerate(_need(doc, "one_cells", where)):
        ones[_t(row[0])] = (_t(row[1]), _t(row[2]))
    twos = {}
    for k, row in enumerate(_need(doc, "two_cells", where)):
        twos[_t(row[0])] = (_t(row[1]), _t(row[2]))

    def table(key):
        return {(_t(r[0]), _t(r[1])): _t(r[2]) for r in _need(doc, key, where)}

    return TwoGroupoid.from_tables(
        objects, ones, twos, table("compose"), _pairs(_need(doc, "identity", where), where),
        _pairs(_need(doc, "inverse", where), where), table("vcompose"),
        _pairs(_need(doc, "identity2", where), where), _pairs(_need(doc, "vinverse", where), where), table("hcompose"),
    )


def _two_doc(S) -> dict:
    ones = sort(S.one_cells)
    twos = sort(S.two_cells)
    comp = [[_j(g), _j(f), _j(S.comp1(g, f))] for f in ones for g in ones if S.s1(g) == S.t1(f)]
    vcomp = [[_j(b), _j(a), _j(S.vcomp(b, a))] for a in twos for b in twos if S.s2(b) == S.t2(a)]
    hcomp = [[_j(b), _j(a), _j(S.hcomp(b, a))] for a in twos for b in twos if S.s1(S.s2(b)) == S.t1(S.s2(a))]
    return {
        "objects": [_j(x) for x in sort(S.objects)],
        "one_cells": [[_j(f), _j(S.s1(f)), _j(S.t1(f))] for f in ones],
        "two_cells": [[_j(a), _j(S.s2(a)), _j(S.t2(a))] for a in twos],
        "compose": comp,
        "identity": [[_j(x), _j(S.ident1(x))] for x in sort(S.objects)],
        "inverse": [[_j(f), _j(S.inv1(f))] for f in ones],
        "vcompose": vcomp,
        "identity2": [[_j(f), _j(S.ident2(f))] for f in ones],
        "vinverse": [[_j(a), _j(S.vinv(a))] for a in twos],
        "hcompose": hcomp,
    }


def _two_presheaf_from(doc, where):
    from .two_gpd import TwoFunctor, TwoGroupoidPresheaf, resolution

    site = _site_from(_need(doc, "site", where), f"{where}.site")
    if doc.get("builder") == "resolution":
        return resolution(_gpd_presheaf_from(dict(_need(doc, "groupoid", where), site=doc["site"]), f"{where}.groupoid"))
    secs = _need(doc, "sections", where)
    sections = {U: _two_from(_need(secs, U, f"{where}.sections"), f"{where}.sections.{U}") for U in site.objects}
    rs = _need(doc, "restrict", where)
    restrict = {}
    for f, (V, U) in site.category.morphisms.items():
        S = sections[U]
        if f in rs:
            r = rs[f]
            w = f"{where}.restrict.{f}"
            restrict[f] = TwoFunctor(_pairs(_need(r, "objects", w), w), _pairs(_need(r, "one_cells", w), w),
                                     _pairs(_need(r, "two_cells", w), w))
        elif f == site.category.identities[U]:
            restrict[f] = TwoFunctor({x: x for x in S.objects}, {c: c for c in S.one_cells}, {c: c for c in S.two_cells})
        else:
            raise ParseError(f"{where}.restrict", f"missing restriction for {f}")
    return TwoGroupoidPresheaf(site, sections, restrict)


def _two_presheaf_doc(H) -> dict:
    def rows(m):
        return [[_j(a), _j(b)] for a, b in sorted(m.items(), key=lambda kv: sort([kv[0]]))]

    return {
        "site": _site_doc(H.site),
        "sections": {U: _two_doc(H.sections[U]) for U in H.site.objects},
        "restrict": {f: {"objects": rows(F.obj), "one_cells": rows(F.one), "two_cells": rows(F.two)}
                     for f, F in sorted(H.restrict.items())},
    }


# ---------------------------------------------------------------- atlases and cocycles


def _group_presheaf_from(doc, site, where):
    from .gpd import GroupPresheaf

    groups = {o: _group_from(g, f"{where}.groups.{o}") for o, g in _need(doc, "groups", where).items()}
    restrict = {m: _pairs(r, f"{where}.restrict.{m}") for m, r in _need(doc, "restrict", where).items()}
    missing = set(site.objects) - set(groups)
    if missing:
        raise ParseError(f"{where}.groups", f"missing slice objects {sort(missing)}")
    return GroupPresheaf(site, groups, restrict)


def _group_presheaf_doc(P) -> dict:
    return {
        "groups": {o: _group_doc(G) for o, G in sorted(P.groups.items())},
        "restrict": {m: [[_j(a), _j(b)] for a, b in sorted(r.items(), key=lambda kv: sort([kv[0]]))]
                     for m, r in sorted(P.restrict.items())},
    }


def _atlas_from(doc, where):
    from .atlas import GroupSheafAtlas, canonical_sheaf, constant_atlas, make_atlas
    from .site import slice_site

    site = _site_from(_need(doc, "site", where), f"{where}.site")
    name = doc.get("name", "atlas")
    if doc.get("builder") == "constant":
        groups = doc.get("groups") or [_need(doc, "group", where)]
        if "name" not in doc and all(isinstance(g, str) for g in groups):
            name = "const-" + "+".join(groups)
        atlases = [constant_atlas(site, _group_from(g, f"{where}.group")) for g in groups]
        items = [(U, A.sheaves[U][s]) for A in atlases for U in site.objects for s in A.objects(U)]
        return make_atlas(site, items, name)
    sheaves = {}
    for U in site.objects:
        sl = slice_site(site, U)
        sheaves[U] = {}
        for k, blob in enumerate(_need(doc, "sheaves", where).get(U, [])):
            P = _group_presheaf_from(blob, sl, f"{where}.sheaves.{U}[{k}]")
            sid, C, _ = canonical_sheaf(P)
            sheaves[U][sid] = C
    given = None
    if "isos" in doc:
        given = {}
        for k, row in enumerate(doc["isos"]):
            if len(row) != 4:
                raise ParseError(f"{where}.isos[{k}]", "expected [U, source id, target id, components]")
            given.setdefault((row[0], row[1], row[2]), []).append(_t(row[3]))
    return GroupSheafAtlas(site, sheaves, given, name)


def _atlas_doc(A) -> dict:
    isos = []
    for U in A.site.objects:
        for a in A.objects(U):
            for b in A.objects(U):
                for c in A.isos(U, a, b):
                    isos.append([U, a, b, _j(c)])
    return {
        "name": A.name,
        "site": _site_doc(A.site),
        "sheaves": {U: [_group_presheaf_doc(A.sheaves[U][s]) for s in A.objects(U)] for U in A.site.objects},
        "isos": isos,
    }


def _cocycle_from(doc, where):
    from .atlas import canonical_cocycle
    from .groth import point_cocycle

    b = _need(doc, "builder", where)
    if b == "canonical":
        gdoc = _need(doc, "gerbe", where)
        G = _gpd_presheaf_from(gdoc, f"{where}.gerbe")
        return canonical_cocycle(G)
    if b == "point":
        A = _atlas_from(_need(doc, "atlas", where), f"{where}.atlas")
        return point_cocycle(A, dict(_need(doc, "objects", where)))
    raise ParseError(f"{where}.builder", f"unknown cocycle builder {b!r}")


_READERS = {
    "site": _site_from,
    "presheaf": _presheaf_from,
    "groupoid_presheaf": _gpd_presheaf_from,
    "two_groupoid_presheaf": _two_presheaf_from,
    "atlas": _atlas_from,
    "cocycle": _cocycle_from,
}


def from_doc(doc: dict, where: str = "$") -> tuple[str, Any]:
    """Decode a parsed document into ``(kind, object)``."""
    if not isinstance(doc, dict):
        raise ParseError(where, "document must be an object")
    if doc.get("format") != FORMAT:
        raise ParseError(f"{where}.format", f"expected {FORMAT!r}")
    if doc.get("version") != VERSION:
        raise ParseError(f"{where}.version", f"unsupported version {doc.get('version')!r}")
    kind = _need(doc, "kind", where)
    if kind not in _READERS:
        raise ParseError(f"{where}.kind", f"unknown kind {kind!r}")
    return kind, _READERS[kind](doc, where)


def _read(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None


def loads(text: str) -> tuple[str, Any]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return from_doc(doc)


def load(path) -> tuple[str, Any]:
    return from_doc(_read(path), str(path))


_WRITERS = {
    "site": _site_doc,
    "presheaf": _presheaf_doc,
    "groupoid_presheaf": _gpd_presheaf_doc,
    "two_groupoid_presheaf": _two_presheaf_doc,
    "atlas": _atlas_doc,
}


def to_doc(kind: str, obj) -> dict:
    body = _WRITERS[kind](obj)
    return {"format": FORMAT, "version": VERSION, "kind": kind, **body}


def dumps(kind: str, obj) -> str:
    return json.dumps(to_doc(kind, obj), indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def dump(kind: str, obj, path) -> None:
    Path(path).write_text(dumps(kind, obj))
