"""Compile English and Urdu hybrid-grammar texts to text circuits."""

__version__ = "0.1.0"
