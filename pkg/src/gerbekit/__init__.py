"""Finite Grothendieck sites, presheaves of groupoids and 2-groupoids, and
desk-scale checks of the homotopy classification of gerbes by cocycles."""

from .atlas import GroupSheafAtlas, canonical_cocycle, constant_atlas, make_atlas
from .classify import Bounds, Corpus, render_report, verify_theorem20, verify_theorem23
from .gpd import Groupoid, GroupoidPresheaf, is_cech, is_gerbe, is_lwe
from .groth import Cocycle, grothendieck, homotopy_path, psi
from .groups import FiniteGroup, cyclic, klein, symmetric3
from .presheaf import SetPresheaf, sheafify
from .site import FiniteCategory, FiniteSite, open_cover_site, poset_site, terminal_site, validate_site
from .two_gpd import TwoGroupoid, TwoGroupoidPresheaf, is_lwe2, resolution

__version__ = "0.1.0"

__all__ = [
    "GroupSheafAtlas",
    "canonical_cocycle",
    "constant_atlas",
    "make_atlas",
    "Bounds",
    "Corpus",
    "render_report",
    "verify_theorem20",
    "verify_theorem23",
    "Groupoid",
    "GroupoidPresheaf",
    "is_cech",
    "is_gerbe",
    "is_lwe",
    "Cocycle",
    "grothendieck",
    "homotopy_path",
    "psi",
    "FiniteGroup",
    "cyclic",
    "klein",
    "symmetric3",
    "SetPresheaf",
    "sheafify",
    "FiniteCategory",
    "FiniteSite",
    "open_cover_site",
    "poset_site",
    "terminal_site",
    "validate_site",
    "TwoGroupoid",
    "TwoGroupoidPresheaf",
    "is_lwe2",
    "resolution",
]
