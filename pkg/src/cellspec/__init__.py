"""Cellularity, density and relative spectra of finite preorders."""
from .constructions import (
    AntichainFamily,
    FiniteSupportProduct,
    FPoset,
    PointedPreorder,
    f_poset,
    finite_support_product,
    product,
    projection,
    pullback_antichain,
    t_family,
    witness_family,
)
from .errors import CellspecError
from .generators import canonical_form, canonical_preorders, enumerate_preorders, random_preorder, random_stream
from .order import (
    MonotoneMap,
    Preorder,
    cellularity,
    density,
    is_antichain,
    is_centered,
    is_dense,
    is_n_linked,
    linked_free_number,
)
from .spectrum import SpectrumQuery, char_k, invariant_chain_report, rel_spectrum_member, spectrum_set
from .topology import FiniteSpace, alexandrov_space, open_poset, space_product

__version__ = "0.1.0"

__all__ = [
    "AntichainFamily", "CellspecError", "FiniteSpace", "FiniteSupportProduct", "FPoset",
    "MonotoneMap", "PointedPreorder", "Preorder", "SpectrumQuery",
    "alexandrov_space", "canonical_form", "canonical_preorders", "cellularity", "char_k",
    "density", "enumerate_preorders", "f_poset", "finite_support_product",
    "invariant_chain_report", "is_antichain", "is_centered", "is_dense", "is_n_linked",
    "linked_free_number", "open_poset", "product", "projection", "pullback_antichain",
    "random_preorder", "random_stream", "rel_spectrum_member", "space_product",
    "spectrum_set", "t_family", "witness_family",
]
