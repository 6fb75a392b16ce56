"""Exact computations for cluster complexes and fine Floer complexes."""
