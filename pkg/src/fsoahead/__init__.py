"""Anticipating FSO link attenuation from RF beacon measurements in a LEO constellation."""

__version__ = "0.1.0"
