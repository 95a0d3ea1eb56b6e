"""Summary length budgets."""

from dataclasses import dataclass
from enum import Enum

from src.errors import SelectionError


class BudgetKind(Enum):
    """How a summary's length is limited."""

    SENTENCES = "sentences"
    WORDS = "words"


@dataclass(frozen=True)
class SummaryBudget:
    """A limit of ``limit`` sentences or ``limit`` words (terms)."""

    kind: BudgetKind
    limit: int

    def __post_init__(self) -> None:
        if self.limit < 1:
            raise SelectionError(f"budget limit must be >= 1, got {self.limit}")

    @classmethod
    def sentences(cls, k: int) -> "SummaryBudget":
        return cls(BudgetKind.SENTENCES, k)

    @classmethod
    def words(cls, w: int) -> "SummaryBudget":
        return cls(BudgetKind.WORDS, w)

    @classmethod
    def parse(cls, text: str) -> "SummaryBudget":
        """
        Parse "sentences:K" or "words:W".

        Raises:
            SelectionError: Malformed budget text
        """
        kind, sep, value = text.partition(":")
        if not sep:
            raise SelectionError(f"budget must look like 'sentences:3' or 'words:200', got '{text}'")
        try:
            budget_kind = BudgetKind(kind.strip().lower())
            limit = int(value)
        except ValueError as e:
            raise SelectionError(f"invalid budget '{text}'") from e
        return cls(budget_kind, limit)

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.limit}"
