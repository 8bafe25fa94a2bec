"""Cost-layer evolution strategies for nvqrao."""

from .methods import (
    EvolutionKind,
    EvolutionMethod,
    TermGroup,
    cost_layer,
    evolve,
    evolve_exact,
    evolve_grouped_trotter,
    evolve_trotter,
    group_terms_by_support,
)
from .spectral_cache import (
    Spectrum,
    cached_spectrum,
    clear_spectral_cache,
    register_spectrum,
    spectrum_of,
)

__all__ = [
    "EvolutionKind",
    "EvolutionMethod",
    "TermGroup",
    "cost_layer",
    "evolve",
    "evolve_exact",
    "evolve_grouped_trotter",
    "evolve_trotter",
    "group_terms_by_support",
    "Spectrum",
    "cached_spectrum",
    "clear_spectral_cache",
    "register_spectrum",
    "spectrum_of",
]
