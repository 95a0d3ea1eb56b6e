"""ROUGE and sentence-F1 evaluation."""
