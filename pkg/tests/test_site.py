from hypothesis import given, strategies as st

from gerbekit import io
from gerbekit.groups import cyclic, symmetric3
from gerbekit.site import (
    FiniteSite,
    Sieve,
    all_sieves,
    group_site,
    is_sieve,
    pullback_sieve,
    relabel_site,
    saturate,
    sieve_generated,
    slice_site,
    terminal_site,
    trivial_site,
    validate_site,
)

from conftest import SITES, arrow_category, four, sierpinski


def test_terminal_site_is_valid():
    assert validate_site(terminal_site()) == []


def test_stability_violation_names_the_morphism():
    cat = arrow_category()
    covering = {"0": frozenset([frozenset({"i0"})]),
                "1": frozenset([frozenset(), frozenset({"f"}), frozenset({"f", "i1"})])}
    vs = validate_site(FiniteSite(cat, covering))
    assert vs and vs[0].axiom == "stability"
    assert vs[0].witness == ("1", (), "f")


def test_open_cover_poset_of_two_point_space_is_valid():
    assert validate_site(four()) == []


def test_broken_composition_is_reported():
    cat = arrow_category()
    bad = dict(cat.compose)
    bad["i1", "f"] = "i1"
    s = trivial_site(type(cat)(cat.objects, cat.morphisms, cat.identities, bad))
    vs = validate_site(s)
    assert vs and any(("i1", "f") == v.witness[:2] for v in vs)


def test_non_sieve_covering_is_reported_with_witness():
    s = sierpinski()
    cov = dict(s.covering)
    cov["ab"] = cov["ab"] | {frozenset({"ab->ab"})}
    vs = validate_site(FiniteSite(s.category, cov))
    assert vs[0].axiom == "sieve-closure"
    assert vs[0].witness[2] == ("ab->ab", "a->ab")


def test_pullback_examples():
    s = four()
    cat = s.category
    for phi in cat.morphisms:
        V, U = cat.morphisms[phi]
        top = Sieve(U, s.maximal(U))
        assert pullback_sieve(s, top, phi).members == s.maximal(V)
    R = Sieve("ab", sieve_generated(s, "ab", ["a->ab", "b->ab"]))
    assert pullback_sieve(s, R, "ab->ab") == R
    assert pullback_sieve(s, R, "a->ab").members == s.maximal("a")


def test_slice_over_terminal_object_matches_base():
    s = four()
    sl = slice_site(s, "ab")
    assert len(sl.objects) == len(s.objects)
    assert len(sl.category.morphisms) == len(s.category.morphisms)
    assert sorted(len(sl.covering[p]) for p in sl.objects) == sorted(len(s.covering[U]) for U in s.objects)


def test_slice_of_group_site_has_one_object_per_element():
    G = symmetric3()
    sl = slice_site(group_site(G), "*")
    assert len(sl.objects) == len(G.elements)
    assert validate_site(sl) == []


def test_slices_of_valid_sites_are_valid(any_site):
    for U in any_site.objects:
        assert validate_site(slice_site(any_site, U)) == []


def test_every_stored_sieve_is_closed(any_site):
    cat = any_site.category
    for U in cat.objects:
        for R in any_site.covering[U]:
            assert is_sieve(cat, U, R) is None


def test_saturate_is_idempotent(any_site):
    cat = any_site.category
    assert saturate(cat, any_site.covering) == dict(any_site.covering)


@given(st.sampled_from(sorted(SITES)), st.data())
def test_pullback_composes(name, data):
    s = SITES[name]()
    cat = s.category
    U = data.draw(st.sampled_from(cat.objects))
    R = data.draw(st.sampled_from(all_sieves(cat, U)))
    phi = data.draw(st.sampled_from(cat.into(U)))
    psi = data.draw(st.sampled_from(cat.into(cat.src(phi))))
    twice = pullback_sieve(s, pullback_sieve(s, Sieve(U, R), phi), psi)
    assert twice == pullback_sieve(s, Sieve(U, R), cat.comp(phi, psi))


@given(st.sampled_from(sorted(SITES)), st.integers(0, 10**6))
def test_relabelled_sites_stay_valid(name, seed):
    s = relabel_site(SITES[name](), seed)
    assert validate_site(s) == []


def test_site_round_trip_is_bit_exact(any_site):
    text = io.dumps("site", any_site)
    kind, back = io.loads(text)
    assert kind == "site"
    assert io.dumps("site", back) == text


def test_group_site_from_cyclic_is_valid():
    assert validate_site(group_site(cyclic(3))) == []
