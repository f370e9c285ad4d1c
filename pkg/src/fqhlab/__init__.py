"""Scattering parameters, pseudo-potentials and lowest-Landau-level spectra
for short-range interactions in strong magnetic fields."""

__version__ = "0.1.0"

from . import confinement, lllspace, potentials, scattering, twobody  # noqa: E402

__all__ = ["__version__", "confinement", "lllspace", "potentials", "scattering", "twobody"]
