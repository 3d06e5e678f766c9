"""Capparelli check: exact verification of the generalized Capparelli identities."""

__version__ = "0.1.0"
