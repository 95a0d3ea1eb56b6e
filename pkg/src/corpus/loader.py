"""
Corpus ingestion and dataset splitting.

Corpus files are UTF-8 with one JSON record per line carrying ``id``,
``body`` and ``reference`` (and optionally per-sentence ``labels``).
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

from pydantic import ValidationError

from src.corpus.models import CorpusSplit, RawDocument
from src.errors import CorpusParseError, CorpusValidationError, SplitError
from src.utils.seeding import derive_rng

logger = logging.getLogger("gamsum.corpus.loader")

LINES_OF_RECORDS = "lines-of-records"
DEFAULT_RATIOS: Tuple[float, float, float] = (0.8, 0.1, 0.1)


def load_corpus(path: Union[str, Path], format: str = LINES_OF_RECORDS) -> List[RawDocument]:
    """
    Load a corpus file.

    Args:
        path: Corpus file path
        format: Only "lines-of-records" is supported

    Returns:
        Documents in file order

    Raises:
        CorpusParseError: A line is not a well-formed record
        CorpusValidationError: Two records share an id
    """
    if format != LINES_OF_RECORDS:
        raise CorpusParseError(f"Unsupported corpus format: {format}")

    path = Path(path)
    documents: List[RawDocument] = []
    seen: Dict[str, int] = {}

    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusParseError(f"invalid JSON ({e.msg})", line=line_number) from e
            if not isinstance(record, dict):
                raise CorpusParseError("record is not an object", line=line_number)
            try:
                document = RawDocument.model_validate(record)
            except ValidationError as e:
                fields = ", ".join(".".join(str(p) for p in err["loc"]) or "record" for err in e.errors())
                raise CorpusParseError(f"invalid record ({fields})", line=line_number) from e

            if document.id in seen:
                raise CorpusValidationError(
                    f"duplicate id '{document.id}' on lines {seen[document.id]} and {line_number}"
                )
            seen[document.id] = line_number
            documents.append(document)

    logger.info(f"Loaded {len(documents)} documents from {path}")
    return documents


def split_corpus(ids: Sequence[str], ratios: Sequence[float] = DEFAULT_RATIOS, seed: int = 0) -> CorpusSplit:
    """
    Partition ids into train/validation/test.

    Sizes are ``floor(ratio * n)`` with the remainder handed out by largest
    fractional part (ties go to the earlier part). Membership is a seeded
    shuffle.

    Args:
        ids: Document ids
        ratios: Three positive fractions summing to 1
        seed: Root seed

    Returns:
        The split
    """
    if len(ids) == 0:
        raise SplitError("cannot split an empty id list")
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise SplitError(f"ratios must be three positive fractions, got {list(ratios)}")
    if abs(math.fsum(ratios) - 1.0) > 1e-9:
        raise SplitError(f"ratios must sum to 1, got {math.fsum(ratios)}")
    if len(set(ids)) != len(ids):
        raise SplitError("ids must be unique")

    n = len(ids)
    exact = [r * n for r in ratios]
    sizes = [int(math.floor(e)) for e in exact]
    remainder = n - sum(sizes)
    by_fraction = sorted(range(3), key=lambda k: (-(exact[k] - sizes[k]), k))
    for k in by_fraction[:remainder]:
        sizes[k] += 1

    order = derive_rng(seed, "split").permutation(n)
    shuffled = [ids[i] for i in order]
    train = shuffled[: sizes[0]]
    validation = shuffled[sizes[0] : sizes[0] + sizes[1]]
    test = shuffled[sizes[0] + sizes[1] :]

    logger.info(f"Split {n} documents into {len(train)}/{len(validation)}/{len(test)}")
    return CorpusSplit(train=train, validation=validation, test=test)


def save_split(split: CorpusSplit, path: Union[str, Path]) -> None:
    """Write a split as JSON."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(split.model_dump(), f, indent=2)
        f.write("\n")


def load_split(path: Union[str, Path]) -> CorpusSplit:
    """Read a split written by ``save_split``."""
    with open(path, "r", encoding="utf-8") as f:
        try:
            return CorpusSplit.model_validate(json.load(f))
        except (json.JSONDecodeError, ValidationError) as e:
            raise SplitError(f"invalid split file {path}: {e}") from e


def write_records(records: Iterable[Dict[str, Any]], path: Union[str, Path]) -> int:
    """
    Write records as one JSON object per line.

    Returns:
        Number of records written
    """
    count = 0
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, ensure_ascii=False))
            f.write("\n")
            count += 1
    return count


def read_records(path: Union[str, Path]) -> List[Dict[str, Any]]:
    """Read a JSON-lines file written by ``write_records``."""
    records: List[Dict[str, Any]] = []
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise CorpusParseError(f"invalid JSON ({e.msg})", line=line_number) from e
    return records
