"""Process-wide cache of Hamiltonian eigendecompositions."""

import logging
from collections import OrderedDict
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from ..pauli import DENSE_CAP, CapacityError, Hamiltonian, to_dense

logger = logging.getLogger(__name__)

# Spectra kept before the least recently used one is dropped
MAX_CACHED_SPECTRA = 8


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (ascending) and eigenvector columns of a Hamiltonian."""

    values: np.ndarray
    vectors: np.ndarray

    def propagate(self, amplitudes: np.ndarray, gamma: float) -> np.ndarray:
        """V exp(-i gamma Lambda) V^dagger amplitudes."""
        coeffs = self.vectors.conj().T @ amplitudes
        return self.vectors @ (np.exp(-1j * gamma * self.values) * coeffs)

    @property
    def extrema(self) -> Tuple[float, float]:
        return float(self.values[0]), float(self.values[-1])


# Registry of spectra keyed by Hamiltonian value (Hamiltonians are immutable)
_spectra: "OrderedDict[Hamiltonian, Spectrum]" = OrderedDict()


def register_spectrum(h: Hamiltonian, spectrum: Spectrum) -> None:
    """
    Store a spectrum for h, evicting the least recently used entry when full.

    Args:
        h: The Hamiltonian the spectrum belongs to
        spectrum: Its eigendecomposition
    """
    _spectra[h] = spectrum
    _spectra.move_to_end(h)
    while len(_spectra) > MAX_CACHED_SPECTRA:
        _spectra.popitem(last=False)


def cached_spectrum(h: Hamiltonian) -> Optional[Spectrum]:
    """
    Look up a previously registered spectrum.

    Returns:
        The spectrum, or None if h has not been decomposed yet
    """
    spectrum = _spectra.get(h)
    if spectrum is not None:
        _spectra.move_to_end(h)
    return spectrum


def spectrum_of(h: Hamiltonian) -> Spectrum:
    """
    Eigendecomposition of h, computed once and then served from the cache.

    Raises:
        CapacityError: If h exceeds the dense cap
    """
    spectrum = cached_spectrum(h)
    if spectrum is not None:
        logger.debug("Spectral cache hit (%d qubits, %d terms)", h.n_qubits, len(h))
        return spectrum

    if h.n_qubits > DENSE_CAP:
        raise CapacityError(
            f"Exact evolution of a non-diagonal Hamiltonian is capped at {DENSE_CAP} qubits, "
            f"got {h.n_qubits}"
        )
    logger.debug("Spectral cache miss, diagonalizing %d qubits", h.n_qubits)
    values, vectors = scipy.linalg.eigh(to_dense(h))
    spectrum = Spectrum(values=values, vectors=vectors)
    register_spectrum(h, spectrum)
    return spectrum


def clear_spectral_cache() -> None:
    """Drop every cached spectrum. Useful for testing."""
    _spectra.clear()


def cache_size() -> int:
    return len(_spectra)
