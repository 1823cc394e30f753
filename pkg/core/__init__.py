"""Pilot overhead toolkit: pilot-assisted spectral efficiency for Rayleigh fading."""

__version__ = "1.0.1"
