"""Theta-PR toolkit: deciding phase retrieval when only finitely many phases are allowed."""

__version__ = "0.1.0"
