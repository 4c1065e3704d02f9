import pytest
from hypothesis import HealthCheck, settings

from gerbekit.site import FiniteCategory, open_cover_site, poset_site, terminal_site

settings.register_profile("desk", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("desk")


def sierpinski():
    return poset_site(["a", "ab"], lambda V, U: V == U or (V, U) == ("a", "ab"), "sierp")


def three():
    """{a}, {b} covering {a,b}."""
    return open_cover_site({"a": ["a"], "b": ["b"], "ab": ["a", "b"]}, "three")


def four():
    """All opens of the discrete 2-point space, including the empty one."""
    return open_cover_site({"0": [], "a": ["a"], "b": ["b"], "ab": ["a", "b"]}, "four")


def arrow_category():
    return FiniteCategory(("0", "1"), {"i0": ("0", "0"), "i1": ("1", "1"), "f": ("0", "1")},
                          {"0": "i0", "1": "i1"},
                          {("i0", "i0"): "i0", ("i1", "i1"): "i1", ("f", "i0"): "f", ("i1", "f"): "f"})


SITES = {"terminal": terminal_site, "sierp": sierpinski, "three": three, "four": four}


@pytest.fixture(params=sorted(SITES))
def any_site(request):
    return SITES[request.param]()
