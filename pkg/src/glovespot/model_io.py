"""Save and load trained networks as a small versioned JSON document.

The document keeps weights as row-major nested lists plus the seed and
training settings that produced them, so a reloaded model is bit-identical
and self-describing.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ModelFormatError
from .network import Network

FORMAT_VERSION = 1


def to_document(net: Network) -> dict:
    """Plain-JSON dict for a network; floats keep round-trip precision."""
    net.validate()
    return {
        "format_version": FORMAT_VERSION,
        "layer_sizes": list(net.layer_sizes),
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
        "seed": int(net.rng_seed),
        "trained_epochs": int(net.trained_epochs),
        "alpha": net.alpha,
        "beta": net.beta,
    }


def from_document(doc: dict) -> Network:
    """Rebuild a Network from a dict produced by to_document.

    Raises ModelFormatError on a wrong version, missing fields, or parameter
    shapes that disagree with layer_sizes.
    """
    if not isinstance(doc, dict):
        raise ModelFormatError(f"model document must be a JSON object, got {type(doc).__name__}")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format_version {version!r}, expected {FORMAT_VERSION}")
    for key in ("layer_sizes", "weights", "biases", "seed"):
        if key not in doc:
            raise ModelFormatError(f"model document missing field {key!r}")
    try:
        net = Network(
            layer_sizes=[int(s) for s in doc["layer_sizes"]],
            weights=[np.asarray(w, dtype=float) for w in doc["weights"]],
            biases=[np.asarray(b, dtype=float) for b in doc["biases"]],
            rng_seed=int(doc["seed"]),
            trained_epochs=int(doc.get("trained_epochs", 0)),
            alpha=doc.get("alpha"),
            beta=doc.get("beta"),
        )
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model document: {exc}") from exc
    try:
        net.validate()
    except Exception as exc:
        raise ModelFormatError(f"inconsistent model document: {exc}") from exc
    return net


def save_model(net: Network, path: Union[str, Path]) -> None:
    """Write the JSON document for net to path."""
    path = Path(path)
    path.write_text(json.dumps(to_document(net)) + "\n")


def load_model(path: Union[str, Path]) -> Network:
    """Read a network from a JSON document at path."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path} is not valid JSON: {exc}") from exc
    return from_document(doc)


def cascade_to_document(cascade) -> dict:
    """Single JSON document for a full cascade: both nets plus decision settings."""
    return {
        "format_version": FORMAT_VERSION,
        "kind": "cascade",
        "lag": int(cascade.lag),
        "accept_threshold": float(cascade.accept_threshold),
        "debounce_frames": int(cascade.debounce_frames),
        "one_shot_edge": bool(cascade.one_shot_edge),
        "net_comm": to_document(cascade.net_comm),
        "net_non": None if cascade.net_non is None else to_document(cascade.net_non),
    }


def cascade_from_document(doc: dict):
    from .spotter import CascadeModel

    if not isinstance(doc, dict):
        raise ModelFormatError(f"cascade document must be a JSON object, got {type(doc).__name__}")
    if doc.get("kind") != "cascade":
        raise ModelFormatError("not a cascade document (kind != 'cascade')")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format_version {version!r}, expected {FORMAT_VERSION}")
    for key in ("lag", "accept_threshold", "debounce_frames", "net_comm"):
        if key not in doc:
            raise ModelFormatError(f"cascade document missing field {key!r}")
    net_non = doc.get("net_non")
    try:
        return CascadeModel(
            net_comm=from_document(doc["net_comm"]),
            net_non=None if net_non is None else from_document(net_non),
            lag=int(doc["lag"]),
            accept_threshold=float(doc["accept_threshold"]),
            debounce_frames=int(doc["debounce_frames"]),
            one_shot_edge=bool(doc.get("one_shot_edge", True)),
        )
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed cascade document: {exc}") from exc


def save_cascade(cascade, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(cascade_to_document(cascade)) + "\n")


def load_cascade(path: Union[str, Path]):
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path} is not valid JSON: {exc}") from exc
    return cascade_from_document(doc)
