"""Summary budgets and sentence selection."""

from src.summarizer.budget import BudgetKind, SummaryBudget

__all__ = ["BudgetKind", "SummaryBudget"]
