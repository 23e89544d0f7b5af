"""Triangulations of products of two simplices, systems of permutations and
positions of unmixed simplices, with an exact search engine to test them."""

__version__ = "0.1.0"
