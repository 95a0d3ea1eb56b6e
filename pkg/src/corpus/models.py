"""
Corpus record models.

A ``RawDocument`` is one line of a corpus file; a ``CorpusSplit`` partitions
document ids into train/validation/test.
"""

from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class RawDocument(BaseModel):
    """A document exactly as ingested, before preprocessing."""

    model_config = ConfigDict(frozen=True, extra="ignore")

    id: str
    body: Union[str, List[str]]
    reference: List[str]
    labels: Optional[List[int]] = None

    @field_validator("id")
    @classmethod
    def _id_non_empty(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("id must be non-empty")
        return value

    @field_validator("body")
    @classmethod
    def _body_non_empty(cls, value: Union[str, List[str]]) -> Union[str, List[str]]:
        if isinstance(value, str):
            if not value.strip():
                raise ValueError("body must be non-empty")
        elif not any(part.strip() for part in value):
            raise ValueError("body must contain at least one non-empty sentence")
        return value

    @field_validator("labels")
    @classmethod
    def _labels_binary(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None and any(v not in (0, 1) for v in value):
            raise ValueError("labels must be 0 or 1")
        return value

    @model_validator(mode="after")
    def _labels_need_segmented_body(self) -> "RawDocument":
        if self.labels is not None:
            if not isinstance(self.body, list):
                raise ValueError("per-sentence labels require a pre-segmented body (list of sentences)")
            if len(self.labels) != len(self.body):
                raise ValueError(
                    f"labels has {len(self.labels)} entries but body has {len(self.body)} sentences"
                )
        return self

    @property
    def is_presegmented(self) -> bool:
        """True when the body arrived as a list of sentences."""
        return isinstance(self.body, list)

    def to_record(self) -> Dict[str, Any]:
        """Return the record in corpus-file field order."""
        record: Dict[str, Any] = {"id": self.id, "body": self.body, "reference": list(self.reference)}
        if self.labels is not None:
            record["labels"] = list(self.labels)
        return record


class CorpusSplit(BaseModel):
    """Disjoint train/validation/test partition of a corpus id set."""

    model_config = ConfigDict(frozen=True)

    train: List[str]
    validation: List[str]
    test: List[str]

    @model_validator(mode="after")
    def _disjoint(self) -> "CorpusSplit":
        seen = set()
        for part in (self.train, self.validation, self.test):
            overlap = seen.intersection(part)
            if overlap:
                raise ValueError(f"split parts overlap on {sorted(overlap)[:5]}")
            seen.update(part)
        return self

    def all_ids(self) -> List[str]:
        """All ids in train, validation, test order."""
        return list(self.train) + list(self.validation) + list(self.test)

    def subset(self, name: str) -> List[str]:
        """
        Look up one part by name.

        Args:
            name: "train", "validation" or "test"

        Returns:
            The ids in that part
        """
        if name not in ("train", "validation", "test"):
            raise ValueError(f"Unknown split part: {name}")
        return list(getattr(self, name))
