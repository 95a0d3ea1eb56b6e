"""Trainers for the additive sentence scorer. Use ``src.training.registry.train_model``."""
