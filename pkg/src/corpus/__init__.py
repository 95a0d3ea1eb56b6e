"""Corpus records, splits and model files."""
