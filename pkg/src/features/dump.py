"""Tab-separated feature dump: one row per sentence."""

from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.errors import SchemaError
from src.features.extraction import FEATURE_NAMES
from src.oracle.labeling import TrainingSet

ID_COLUMNS = ("doc_id", "sentence_index")
LABEL_COLUMN = "label"
DUMP_COLUMNS = ID_COLUMNS + FEATURE_NAMES + (LABEL_COLUMN,)


def feature_frame(
    rows: Iterable[Tuple[str, np.ndarray, Optional[Sequence[int]]]],
) -> pd.DataFrame:
    """
    Assemble the dump table.

    Args:
        rows: (doc_id, feature matrix, labels or None) per document

    Returns:
        DataFrame with DUMP_COLUMNS; missing labels are -1
    """
    frames = []
    for doc_id, matrix, labels in rows:
        n = matrix.shape[0]
        frame = pd.DataFrame(matrix, columns=list(FEATURE_NAMES))
        frame.insert(0, "sentence_index", np.arange(n, dtype=np.int64))
        frame.insert(0, "doc_id", doc_id)
        frame[LABEL_COLUMN] = np.asarray(labels, dtype=np.int64) if labels is not None else -1
        frames.append(frame)
    if not frames:
        return pd.DataFrame({c: pd.Series(dtype="float64") for c in DUMP_COLUMNS})
    return pd.concat(frames, ignore_index=True)[list(DUMP_COLUMNS)]


def write_feature_dump(frame: pd.DataFrame, path: Union[str, Path]) -> None:
    """Write a dump with full float precision."""
    frame.to_csv(path, sep="\t", index=False, float_format="%.17g")


def read_feature_dump(path: Union[str, Path], feature_names: Sequence[str] = FEATURE_NAMES) -> pd.DataFrame:
    """
    Read a dump and check its feature columns are present, numeric and finite.

    Raises:
        SchemaError: The file cannot be parsed, a required column is missing,
            or a feature value is not a finite number
    """
    try:
        frame = pd.read_csv(path, sep="\t", dtype={"doc_id": str}, float_precision="round_trip")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise SchemaError(f"{path}: unreadable feature dump: {e}") from e
    required = list(ID_COLUMNS) + list(feature_names)
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}")

    values = frame[list(feature_names)].apply(pd.to_numeric, errors="coerce").to_numpy(dtype=np.float64)
    bad_rows = ~np.isfinite(values).all(axis=1)
    if bad_rows.any():
        first = frame.loc[bad_rows, list(ID_COLUMNS)].iloc[0].tolist()
        raise SchemaError(f"{path}: {int(bad_rows.sum())} rows have non-finite or non-numeric features (first {first})")
    frame[list(feature_names)] = values
    return frame


def training_set_from_dump(frame: pd.DataFrame, feature_names: Sequence[str] = FEATURE_NAMES) -> TrainingSet:
    """
    Labeled rows of a dump as a TrainingSet.

    Raises:
        SchemaError: The dump has no labels, some rows are unlabeled, or a
            label is neither 0 nor 1
    """
    if LABEL_COLUMN not in frame.columns:
        raise SchemaError("feature dump has no label column")
    raw = pd.to_numeric(frame[LABEL_COLUMN], errors="coerce").to_numpy(dtype=np.float64)
    if np.any(raw < 0):
        raise SchemaError(f"{int(np.sum(raw < 0))} rows of the feature dump are unlabeled")
    invalid = ~np.isin(raw, (0.0, 1.0))
    if invalid.any():
        raise SchemaError(f"{int(invalid.sum())} rows of the feature dump have labels other than 0 or 1")
    return TrainingSet.from_arrays(
        frame[list(feature_names)].to_numpy(dtype=np.float64),
        raw.astype(np.int64),
        frame["doc_id"].astype(str).tolist(),
        frame["sentence_index"].to_numpy(dtype=np.int64),
    )
