"""
Model files: versioned, checksummed JSON.

Keys are written in a fixed order and floats through ``repr``, so saving the
same model twice gives byte-identical files and loading restores every value
bit for bit.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from src.errors import ModelIntegrityError, UnsupportedModelVersionError
from src.gam.binning import Binner
from src.gam.model import AdditiveModel
from src.training.gaminet import GaminetModel
from src.training.registry import TrainedModel, as_additive
from src.training.subnetwork import Subnetwork

logger = logging.getLogger("gamsum.corpus.persistence")

FORMAT_VERSION = 1
MODEL_KEYS = ("format_version", "model_kind", "feature_names", "training_config", "payload", "networks", "checksum")


def _jsonable(value: Any) -> Any:
    """Plain Python types for numpy scalars, arrays and tuples, recursively."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def _canonical(document: Dict[str, Any]) -> str:
    return json.dumps(document, ensure_ascii=False, allow_nan=False, separators=(",", ":"))


def _checksum(document: Dict[str, Any]) -> str:
    body = {key: document[key] for key in MODEL_KEYS if key != "checksum"}
    return hashlib.sha256(_canonical(body).encode("utf-8")).hexdigest()


def _payload(model: AdditiveModel) -> Dict[str, Any]:
    return {
        "intercept": model.intercept,
        "binner": model.binner.to_dict(),
        "pair_binner": model.pair_binner.to_dict(),
        "mains": [{"feature": f, "values": shape.tolist()} for f, shape in model.mains.items()],
        "pairs": [{"pair": [i, j], "values": surface.tolist()} for (i, j), surface in model.pairs.items()],
        "metadata": _jsonable(model.metadata),
    }


def model_document(model: TrainedModel, training_config: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """The JSON document for a model, checksum included."""
    additive = as_additive(model)
    networks = None
    if isinstance(model, GaminetModel):
        networks = {
            "intercept": model.intercept,
            "mains": [net.to_dict() for net in model.mains.values()],
            "pairs": [net.to_dict() for net in model.pairs.values()],
        }
    document: Dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "model_kind": str(additive.metadata.get("model_kind", "additive")),
        "feature_names": list(additive.feature_names),
        "training_config": _jsonable(training_config or {}),
        "payload": _payload(additive),
        "networks": networks,
        "checksum": "",
    }
    document["checksum"] = _checksum(document)
    return document


def save_model(model: TrainedModel, path: Union[str, Path], training_config: Optional[Dict[str, Any]] = None) -> None:
    """
    Write a model file.

    Args:
        model: AdditiveModel or GaminetModel
        path: Destination
        training_config: The trainer configuration section, stored for provenance
    """
    document = model_document(model, training_config)
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(document, ensure_ascii=False, allow_nan=False, indent=1))
        f.write("\n")
    logger.info(f"Saved {document['model_kind']} model to {path}")


def model_from_document(document: Dict[str, Any]) -> TrainedModel:
    """
    Rebuild a model from its JSON document.

    Raises:
        UnsupportedModelVersionError: Unknown format_version
        ModelIntegrityError: Missing keys, checksum mismatch or invalid tables
    """
    if not isinstance(document, dict):
        raise ModelIntegrityError("model file must contain a JSON object")
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedModelVersionError(f"model format_version {version!r} is not supported (expected {FORMAT_VERSION})")
    missing = [key for key in MODEL_KEYS if key not in document]
    if missing:
        raise ModelIntegrityError(f"model file lacks keys {missing}")
    if document["checksum"] != _checksum(document):
        raise ModelIntegrityError("model checksum mismatch; the file was modified or truncated")

    payload = document["payload"]
    try:
        additive = AdditiveModel(
            intercept=payload["intercept"],
            mains={int(m["feature"]): np.asarray(m["values"], dtype=np.float64) for m in payload["mains"]},
            pairs={
                (int(p["pair"][0]), int(p["pair"][1])): np.asarray(p["values"], dtype=np.float64)
                for p in payload["pairs"]
            },
            binner=Binner.from_dict(payload["binner"]),
            pair_binner=Binner.from_dict(payload["pair_binner"]),
            feature_names=tuple(document["feature_names"]),
            metadata=dict(payload.get("metadata", {})),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ModelIntegrityError(f"model tables are invalid: {e}") from e

    networks = document["networks"]
    if networks is None:
        return additive
    try:
        mains = {net.features[0]: net for net in map(Subnetwork.from_dict, networks["mains"])}
        pairs = {(net.features[0], net.features[1]): net for net in map(Subnetwork.from_dict, networks["pairs"])}
    except (KeyError, TypeError, ValueError) as e:
        raise ModelIntegrityError(f"model networks are invalid: {e}") from e
    return GaminetModel(additive, networks["intercept"], mains, pairs)


def load_model(path: Union[str, Path]) -> TrainedModel:
    """Read and verify a model file."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise ModelIntegrityError(f"model file {path} is not valid JSON: {e}") from e
    model = model_from_document(document)
    logger.info(f"Loaded {document['model_kind']} model from {path}")
    return model
