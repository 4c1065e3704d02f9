from itertools import islice

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from gerbekit.enumerate import (
    crossed_modules,
    enumerate_crossed_module_presheaves,
    enumerate_gerbes,
    enumerate_groupoid_presheaves,
)
from gerbekit.gpd import (
    GroupoidPresheaf,
    aut_map,
    constant_group_presheaf,
    discrete_presheaf,
    is_cech,
    pi0_map,
)
from gerbekit.groups import cyclic, symmetric3, trivial_group
from gerbekit.presheaf import constant_presheaf, is_bijective
from gerbekit.site import terminal_site
from gerbekit.two_gpd import (
    check_lemma6,
    check_lemma8,
    constant_two_presheaf,
    crossed_module,
    discrete_two,
    homotopy_sheaves,
    identity_two_map,
    interval_legs,
    interval_product,
    is_lwe2,
    pi_groupoid,
    pi_map,
    resolution,
    to_point,
)

from conftest import SITES, sierpinski, three


def group_gerbe(site, G):
    return GroupoidPresheaf.from_group_presheaf(constant_group_presheaf(site, G))


def pi2_z2():
    Z2 = cyclic(2)
    return crossed_module(trivial_group(), Z2, {n: trivial_group().e for n in Z2.elements})


def test_pi_of_discrete_two_is_the_groupoid():
    G = group_gerbe(sierpinski(), cyclic(3))
    P, _ = pi_groupoid(discrete_two(G))
    assert {U: len(S.arrows) for U, S in P.sections.items()} == {U: 3 for U in G.site.objects}


def test_pi_of_resolution_is_cech_with_arrows_where_g_has_them():
    for G in enumerate_groupoid_presheaves(sierpinski(), 2, 2):
        P, _ = pi_groupoid(resolution(G))
        assert is_cech(P)
        for U, S in G.sections.items():
            for x in S.objects:
                for y in S.objects:
                    assert bool(P.sections[U].hom(x, y)) == bool(S.hom(x, y))


def test_pi_of_crossed_module_is_cokernel_of_boundary():
    S3, Z3 = symmetric3(), cyclic(3)
    A3 = [g for g in S3.elements if S3.element_order(g) in (1, 3)]
    # Z3 onto A3 with S3 acting by conjugation through the boundary
    gen = next(g for g in A3 if g != S3.e)
    d = {"0": S3.e, "1": gen, "2": S3.mul[gen, gen]}
    back = {v: k for k, v in d.items()}
    act = {(q, n): back[S3.conj(q, d[n])] for q in S3.elements for n in Z3.elements}
    H = constant_two_presheaf(terminal_site(), crossed_module(S3, Z3, d, act))
    assert H.violations() == []
    P, _ = pi_groupoid(H)
    assert len(P.sections["*"].arrows) == 2


def test_homotopy_sheaves_examples():
    s = sierpinski()
    D = discrete_two(discrete_presheaf(constant_presheaf(s, ["x", "y"])))
    hs = homotopy_sheaves(D)
    assert all(len(G.groups[p]) == 1 for k in ("pi1", "pi2") for G in hs[k].values() for p in G.groups)
    H = constant_two_presheaf(terminal_site(), pi2_z2())
    assert len(homotopy_sheaves(H)["pi2"]["*", "*"].groups["1"]) == 2
    for G in enumerate_gerbes(s, 2, 2):
        hs = homotopy_sheaves(resolution(G))
        assert all(len(Q.groups[p]) == 1 for k in ("pi1", "pi2") for Q in hs[k].values() for p in Q.groups)
        assert {U: len(v) for U, v in hs["pi0"].sections.items()} == \
            {U: len(v) for U, v in homotopy_sheaves(discrete_two(G))["pi0"].sections.items()}


def test_is_lwe2_examples():
    s = three()
    G = group_gerbe(s, symmetric3())
    R = resolution(G)
    assert is_lwe2(identity_two_map(R))
    assert is_lwe2(to_point(R))
    assert not is_lwe2(to_point(discrete_two(G)))


def test_resolution_shapes():
    s = sierpinski()
    X = constant_presheaf(s, ["x", "y"])
    R = resolution(discrete_presheaf(X))
    assert all(len(S.two_cells) == len(S.one_cells) for S in R.sections.values())
    Rg = resolution(group_gerbe(s, cyclic(3)))
    assert all(len(S.objects) == 1 and len(S.two_cells) == 9 for S in Rg.sections.values())


def test_interval_product_legs_are_lwe():
    R = resolution(group_gerbe(sierpinski(), cyclic(2)))
    I = interval_product(R)
    assert I.violations() == []
    for leg in interval_legs(R, I):
        assert leg.violations() == []
        assert is_lwe2(leg)


def test_pi_equivalence_checks_examples():
    s = sierpinski()
    r6 = check_lemma6(resolution(group_gerbe(s, cyclic(2))))
    assert r6.left and r6.right
    H = constant_two_presheaf(terminal_site(), pi2_z2())
    r = check_lemma6(H)
    assert not r.left and not r.right
    r8 = check_lemma8(discrete_two(discrete_presheaf(constant_presheaf(s, ["x", "y"]))))
    assert r8.left and r8.right


def test_every_enumerated_crossed_module_is_a_valid_two_groupoid():
    for cm in crossed_modules(3):
        assert cm.two().violations() == []


def _components_by_networkx(S):
    g = nx.Graph()
    g.add_nodes_from(S.objects)
    g.add_edges_from(S.one_cells.values())
    return nx.number_connected_components(g)


@pytest.mark.parametrize("name", ["terminal", "sierp", "three"])
def test_path_components_from_one_cells(name):
    # π0 of the nerve is already determined by 1-simplices
    for H in enumerate_crossed_module_presheaves(SITES[name](), 2):
        P, _ = pi_groupoid(H)
        assert all(len(P.sections[U].components) == _components_by_networkx(S) for U, S in H.sections.items())
    for G in islice(enumerate_groupoid_presheaves(SITES[name](), 2, 2), 2000):
        R = resolution(G)
        P, _ = pi_groupoid(R)
        assert all(len(P.sections[U].components) == _components_by_networkx(S) for U, S in R.sections.items())


_CM = {}


@given(st.sampled_from(["terminal", "sierp"]), st.data())
def test_eta_is_bijective_on_pi0_and_pi1(name, data):
    hs = _CM.setdefault(name, list(enumerate_crossed_module_presheaves(SITES[name](), 3)))
    H = data.draw(st.sampled_from(hs))
    _, eta = pi_groupoid(H)
    f = pi_map(eta)
    assert is_bijective(pi0_map(f))
    for U in H.site.objects:
        for x in H.sections[U].objects:
            assert is_bijective(aut_map(f, U, x))


@pytest.mark.parametrize("name,order", [("terminal", 3), ("sierp", 2), ("three", 2)])
def test_equivalence_checks_agree_on_crossed_modules(name, order):
    for H in enumerate_crossed_module_presheaves(SITES[name](), order):
        assert check_lemma6(H).agree
        assert check_lemma8(H).agree
