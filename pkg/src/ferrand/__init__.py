"""Exact computations with Ferrand pushouts of affine schemes."""
