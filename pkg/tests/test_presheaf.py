import pytest
from hypothesis import given, strategies as st

from gerbekit.enumerate import enumerate_presheaves, presheaf_maps
from gerbekit.presheaf import (
    PresheafMap,
    SetPresheaf,
    compose_maps,
    constant_presheaf,
    identity_map,
    is_bijective,
    is_local_epi,
    is_local_iso,
    is_local_mono,
    is_sheaf,
    map_from_function,
    map_violations,
    plus,
    plus_map,
    presheaf_violations,
    sheafify,
    terminal_presheaf,
)
from conftest import SITES, four, sierpinski, three

CORPUS_SITES = ("terminal", "sierp", "three")


def _corpus(name, size):
    return list(enumerate_presheaves(SITES[name](), size))


def test_identity_is_local_epi_mono_iso(any_site):
    X = constant_presheaf(any_site, ["0", "1"])
    p = identity_map(X)
    assert is_local_epi(p) and is_local_mono(p) and is_local_iso(p, "both")


def test_empty_into_point_is_not_local_epi():
    s = four()
    empty = constant_presheaf(s, [], empty_over=s.objects)
    p = PresheafMap(empty, terminal_presheaf(s), {U: {} for U in s.objects})
    v = is_local_epi(p)
    assert not v
    assert frozenset() not in s.covering["ab"]
    # over the empty open the empty sieve covers, so the witness is elsewhere
    assert v.witness[0] != "0"


def _covering_family_presheaf(site, targets):
    """Coproduct of the representables at ``targets``."""
    cat = site.category
    sections = {V: tuple(f for U in targets for f in cat.hom(V, U)) for V in cat.objects}
    restrict = {g: {f: cat.comp(f, g) for f in sections[cat.tgt(g)]} for g in cat.morphisms}
    return SetPresheaf(site, sections, restrict)


def test_covering_family_is_local_epi():
    s = four()
    X = _covering_family_presheaf(s, ["a", "b"])
    assert presheaf_violations(X) == []
    p = map_from_function(X, terminal_presheaf(s), lambda U, x: "*")
    assert is_local_epi(p)
    assert is_local_iso(p, "both")


def test_injective_map_is_local_mono(any_site):
    X = constant_presheaf(any_site, ["0"])
    Y = constant_presheaf(any_site, ["0", "1"])
    assert is_local_mono(map_from_function(X, Y, lambda U, x: x))


def test_fold_map_is_not_local_mono_under_trivial_topology():
    s = sierpinski()
    XX = constant_presheaf(s, [("l", "0"), ("r", "0")])
    X = constant_presheaf(s, ["0"])
    v = is_local_mono(map_from_function(XX, X, lambda U, x: x[1]))
    assert not v and v.witness[0] == "a"


def test_two_to_one_is_not_local_mono_at_the_top_open():
    s = four()
    p = map_from_function(constant_presheaf(s, ["0", "1"]), terminal_presheaf(s), lambda U, x: "*")
    assert not is_local_mono(p)
    agree = frozenset(f for f in s.category.into("ab") if p.source.res(f, "0") == p.source.res(f, "1"))
    assert agree not in s.covering["ab"]


def test_plus_of_sheaf_has_bijective_unit(any_site):
    X = terminal_presheaf(any_site)
    assert is_sheaf(X)
    assert is_bijective(plus(X)[1])


def test_plus_of_constant_two_without_empty_open():
    X = constant_presheaf(three(), ["0", "1"])
    assert len(plus(X)[0].sections["ab"]) == 4


def test_constant_two_with_empty_open_needs_both_plus_steps():
    # the matching condition over the empty open still sees two values after one step
    s = four()
    X = constant_presheaf(s, ["0", "1"])
    assert len(plus(X)[0].sections["ab"]) == 2
    assert len(plus(X)[0].sections["0"]) == 1
    assert len(sheafify(X)[0].sections["ab"]) == 4


def test_empty_family_over_the_empty_open_is_unique():
    X = constant_presheaf(four(), ["0", "1"])
    assert plus(X)[0].sections["0"] == ((),)


def test_plus_is_functorial():
    s = three()
    X = constant_presheaf(s, ["0", "1"])
    Y = constant_presheaf(s, ["0"])
    Z = terminal_presheaf(s)
    p = map_from_function(X, Y, lambda U, x: "0")
    q = map_from_function(Y, Z, lambda U, x: "*")
    idp = plus_map(identity_map(X))
    assert all(k == v for U in idp.components for k, v in idp.components[U].items())
    lhs = plus_map(compose_maps(q, p))
    rhs = compose_maps(plus_map(q), plus_map(p))
    assert lhs.components == rhs.components
    assert map_violations(plus_map(p)) == []


@pytest.mark.parametrize("name", CORPUS_SITES + ("four",))
def test_sheafify_idempotent_and_unit_local_iso(name):
    for X in _corpus(name, 2):
        S, unit = sheafify(X)
        assert is_sheaf(S)
        assert is_bijective(sheafify(S)[1])
        assert is_local_epi(unit) and is_local_mono(unit)


@pytest.mark.parametrize("name", CORPUS_SITES)
def test_local_iso_characterisations_agree_exhaustively(name):
    ps = _corpus(name, 2)
    n = 0
    for X in ps:
        for Y in ps:
            for p in presheaf_maps(X, Y):
                assert bool(is_local_iso(p)) == bool(is_local_iso(p, "sieves"))
                n += 1
    assert n > 0


@given(st.sampled_from(CORPUS_SITES), st.data())
def test_local_iso_characterisations_agree_on_size_three(name, data):
    ps = _CORPUS3.setdefault(name, _corpus(name, 3))
    X = data.draw(st.sampled_from(ps))
    Y = data.draw(st.sampled_from(ps))
    maps = list(presheaf_maps(X, Y))
    if not maps:
        return
    p = data.draw(st.sampled_from(maps))
    assert is_local_iso(p, "both") == is_local_iso(p)


_CORPUS3: dict = {}


def test_presheaf_corpus_is_valid():
    for name in CORPUS_SITES:
        for X in _corpus(name, 2):
            assert presheaf_violations(X) == []
