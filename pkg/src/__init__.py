"""Spatial von Mises models for directions observed on the 2-simplex."""
