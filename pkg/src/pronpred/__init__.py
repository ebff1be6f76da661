"""Toolkit for cross-lingual pronoun prediction: data extraction from aligned
bitext, the n-gram LM gap-filling baseline, and the official scorer."""

__version__ = '0.1.0'
