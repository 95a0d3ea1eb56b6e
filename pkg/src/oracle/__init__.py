"""Greedy oracle labels and training-set assembly."""

from src.oracle.labeling import TrainingSet, greedy_oracle_labels, undersample

__all__ = ["TrainingSet", "greedy_oracle_labels", "undersample"]
