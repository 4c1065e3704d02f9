import pytest
from hypothesis import given, strategies as st

from gerbekit.enumerate import enumerate_gerbes, enumerate_groupoid_presheaves, shape_groupoid
from gerbekit.gpd import (
    GFunctor,
    Groupoid,
    GroupoidPresheaf,
    aut_presheaf,
    cech_groupoid,
    compose_gmaps,
    constant_group_presheaf,
    discrete_presheaf,
    hom_presheaf,
    identity_gmap,
    is_cech,
    is_cech_definitional,
    is_gerbe,
    is_lwe,
    pi0,
    search_maps,
    to_pi0_map,
    vertex_inclusion,
)
from gerbekit.groups import cyclic, symmetric3
from gerbekit.presheaf import SetPresheaf, constant_presheaf, identity_map, map_from_function, terminal_presheaf
from gerbekit.site import terminal_site

from conftest import SITES, four, sierpinski


def constant_groupoid(site, S):
    ident = GFunctor({x: x for x in S.objects}, {a: a for a in S.arrows})
    return GroupoidPresheaf(site, {U: S for U in site.objects}, {f: ident for f in site.category.morphisms})


def group_gerbe(site, G):
    return GroupoidPresheaf.from_group_presheaf(constant_group_presheaf(site, G))


def covering_family(site, targets):
    cat = site.category
    sections = {V: tuple(f for U in targets for f in cat.hom(V, U)) for V in cat.objects}
    restrict = {g: {f: cat.comp(f, g) for f in sections[cat.tgt(g)]} for g in cat.morphisms}
    X = SetPresheaf(site, sections, restrict)
    return map_from_function(X, terminal_presheaf(site), lambda U, x: "*")


def test_pi0_of_discrete_is_underlying_presheaf():
    X = constant_presheaf(sierpinski(), ["0", "1", "2"])
    P = pi0(discrete_presheaf(X))
    assert P.sections == X.sections and P.restrict == X.restrict


def test_pi0_of_connected_sections_is_a_point():
    G = constant_groupoid(sierpinski(), Groupoid.connected(3, cyclic(2)))
    assert all(len(s) == 1 for s in pi0(G).sections.values())


def test_pi0_of_cech_groupoid_is_the_image():
    p = covering_family(four(), ["a", "b"])
    P = pi0(cech_groupoid(p))
    for U in p.source.site.objects:
        assert len(P.sections[U]) == len(set(p.components[U].values()))


def test_cech_groupoid_shapes():
    s = terminal_site()
    X = constant_presheaf(s, ["0", "1", "2"])
    disc = cech_groupoid(identity_map(X)).sections["*"]
    assert len(disc.arrows) == 3
    codisc = cech_groupoid(map_from_function(X, terminal_presheaf(s), lambda U, x: "*")).sections["*"]
    assert len(codisc.arrows) == 9
    Y = constant_presheaf(s, ["p", "q"])
    C = cech_groupoid(map_from_function(X, Y, lambda U, x: "p" if x in "01" else "q"))
    S = C.sections["*"]
    sizes = sorted(sum(1 for x in S.objects if S.component_of[x] == c) for c in S.components)
    assert sizes == [1, 2]
    assert len(pi0(C).sections["*"]) == 2


def test_hom_presheaf_examples():
    s = sierpinski()
    G = group_gerbe(s, cyclic(3))
    H = hom_presheaf(G, "ab", "*", "*")
    assert all(len(v) == 3 for v in H.sections.values())
    assert H.sections == aut_presheaf(G, "ab", "*").as_set.sections
    D = constant_groupoid(s, Groupoid.discrete(["x", "y"]))
    assert all(v == () for v in hom_presheaf(D, "ab", "x", "y").sections.values())


def test_is_cech_examples():
    s = sierpinski()
    assert is_cech(constant_groupoid(s, Groupoid.discrete(["x", "y"])))
    assert is_cech(cech_groupoid(covering_family(four(), ["a", "b"])))
    v = is_cech(group_gerbe(terminal_site(), cyclic(2)))
    assert not v and v.witness == ("*", "0", "1")


def test_is_gerbe_examples():
    s = sierpinski()
    assert is_gerbe(constant_groupoid(s, Groupoid.connected(2, symmetric3())))
    assert is_gerbe(group_gerbe(s, cyclic(2)))
    two = constant_groupoid(terminal_site(), shape_groupoid(((1, 0), (1, 0)), [cyclic(2)]))
    v = is_gerbe(two)
    assert not v and v.witness == ("connectivity", "*", "0", "1")


def test_empty_top_section_is_not_a_gerbe_under_trivial_topology():
    s = sierpinski()
    S = Groupoid.from_group(cyclic(2), "0")
    E = Groupoid((), {}, {}, {}, {})
    G = GroupoidPresheaf(s, {"a": S, "ab": E},
                         {"a->a": GFunctor({"0": "0"}, {a: a for a in S.arrows}),
                          "ab->ab": GFunctor({}, {}), "a->ab": GFunctor({}, {})})
    assert G.violations() == []
    assert is_gerbe(G).witness == ("nonempty", "ab")


def test_is_lwe_examples():
    s = sierpinski()
    G = constant_groupoid(s, Groupoid.connected(2, cyclic(2)))
    assert is_lwe(identity_gmap(G))
    x = {U: "0" for U in s.objects}
    assert is_lwe(vertex_inclusion(G, x))
    p = covering_family(four(), ["a", "b"])
    assert is_lwe(to_pi0_map(cech_groupoid(p)))


def test_non_equivalence_is_detected():
    s = terminal_site()
    G = group_gerbe(s, cyclic(2))
    D = constant_groupoid(s, Groupoid.discrete(["*"]))
    f = next(search_maps(G, D))
    v = is_lwe(f)
    assert not v and v.witness[0] == "pi1"


@pytest.mark.parametrize("name,bounds", [("terminal", (2, 3)), ("sierp", (2, 2)), ("three", (1, 2))])
def test_cech_tests_agree_with_definition(name, bounds):
    for G in enumerate_groupoid_presheaves(SITES[name](), *bounds):
        assert bool(is_cech(G)) == bool(is_cech_definitional(G))


@pytest.mark.parametrize("name,bounds", [("terminal", (2, 4)), ("sierp", (2, 2)), ("three", (1, 2))])
def test_vertex_inclusions_of_gerbes_are_lwe(name, bounds):
    n = 0
    for G in enumerate_gerbes(SITES[name](), *bounds):
        for x in G.global_objects():
            assert is_lwe(vertex_inclusion(G, x))
            n += 1
    assert n > 0


_SMALL = {}


def _small(name):
    if name not in _SMALL:
        _SMALL[name] = list(enumerate_gerbes(SITES[name](), 2, 2))[:12]
    return _SMALL[name]


@given(st.sampled_from(["terminal", "sierp"]), st.data())
def test_lwe_composition_and_two_of_three(name, data):
    gs = _small(name)
    G, H, K = (data.draw(st.sampled_from(gs)) for _ in range(3))
    fs = list(search_maps(G, H))
    gs_ = list(search_maps(H, K))
    if not fs or not gs_:
        return
    f = data.draw(st.sampled_from(fs))
    g = data.draw(st.sampled_from(gs_))
    a, b, c = bool(is_lwe(f)), bool(is_lwe(g)), bool(is_lwe(compose_gmaps(g, f)))
    # any two of the three force the third
    assert (a + b + c) != 2
