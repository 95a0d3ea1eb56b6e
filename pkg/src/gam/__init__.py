"""Additive model tables, binning, explanations and the logistic baseline."""
