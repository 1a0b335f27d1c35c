"""Euler-class cocycles on the nerve of SO(2p): construction and numerical
certification of the identities they satisfy."""

__version__ = "0.1.0"
