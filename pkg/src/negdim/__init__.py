"""Algebraic spectra of O(D)-symmetric anharmonic oscillators at negative even
dimensions, exact D-parametric perturbation series, and large-order analysis
of the series coefficients and their roots."""

__version__ = "0.1.0"
