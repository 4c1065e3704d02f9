from hypothesis import given, strategies as st

from gerbekit.groups import catalog, cyclic, homomorphisms, isomorphisms, klein, symmetric3, trivial_group

GROUPS = catalog(6)


def test_catalog_contains_all_groups_up_to_order_six():
    # 1, 2, 3, 4 (two), 5, 6 (two)
    assert sorted(len(G) for G in GROUPS) == [1, 2, 3, 4, 4, 5, 6, 6]
    assert all(G.violations() == [] for G in GROUPS)


def test_automorphism_counts():
    assert len(list(isomorphisms(cyclic(3), cyclic(3)))) == 2
    assert len(list(isomorphisms(klein(), klein()))) == 6
    assert len(list(isomorphisms(symmetric3(), symmetric3()))) == 6
    assert list(isomorphisms(cyclic(4), klein())) == []


def test_centers():
    assert len(symmetric3().center) == 1
    assert len(cyclic(4).center) == 4
    assert trivial_group().is_abelian


@given(st.sampled_from(GROUPS), st.sampled_from(GROUPS))
def test_homomorphisms_preserve_products(G, H):
    for h in homomorphisms(G, H):
        assert all(h[G.mul[a, b]] == H.mul[h[a], h[b]] for a in G.elements for b in G.elements)


@given(st.sampled_from(GROUPS), st.data())
def test_conjugation_is_an_automorphism(G, data):
    k = data.draw(st.sampled_from(G.elements))
    c = {g: G.conj(k, g) for g in G.elements}
    assert sorted(c.values()) == sorted(G.elements)
    assert all(c[G.mul[a, b]] == G.mul[c[a], c[b]] for a in G.elements for b in G.elements)
