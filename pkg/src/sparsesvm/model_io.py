"""Versioned JSON serialization for fitted models."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import ColumnTransform
from .kernel import KernelModel
from .multiclass import OVOModel, PairClassifier, predict_ovo

__all__ = ["MODEL_FORMAT", "SavedModel", "save_model", "load_model"]

MODEL_FORMAT = "sparse-svm-model/1"


@dataclass
class SavedModel:
    """A deserialized model plus the training-time feature transform."""

    ovo: OVOModel
    transform: ColumnTransform | None

    def predict_ids(self, raw_features) -> np.ndarray:
        feats = np.atleast_2d(np.asarray(raw_features, dtype=float))
        if self.transform is not None:
            feats = self.transform.apply(feats)
        return np.atleast_1d(predict_ovo(self.ovo, feats))

    def predict_names(self, raw_features) -> list[str]:
        return [self.ovo.class_names[i] for i in self.predict_ids(raw_features)]


def _transform_doc(transform: ColumnTransform | None) -> dict:
    if transform is None:
        return {"kind": "none"}
    return {
        "kind": transform.kind,
        "center": [float(v) for v in transform.center],
        "scale": [float(v) for v in transform.scale],
    }


def _pair_doc(pair: PairClassifier) -> dict:
    doc = {"positive": int(pair.positive), "negative": int(pair.negative)}
    if pair.kernel is not None:
        km = pair.kernel
        doc["kernel"] = {
            "gamma": float(km.gamma),
            "alpha": [float(v) for v in km.alpha],
            "train_features": [[float(v) for v in row] for row in km.train_features],
            "train_labels": [float(v) for v in km.train_labels],
        }
    else:
        doc["coef"] = [float(v) for v in pair.coef]
    return doc


def save_model(path, model: OVOModel, transform: ColumnTransform | None = None) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "class_names": list(model.class_names),
        "transform": _transform_doc(transform),
        "pairs": [_pair_doc(pair) for pair in model.pairs],
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_model(path) -> SavedModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not a valid model file: {exc}") from exc
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(
            f"{path}: unsupported model format {doc.get('format')!r}, expected {MODEL_FORMAT}")
    tdoc = doc["transform"]
    transform = None
    if tdoc["kind"] != "none":
        transform = ColumnTransform(tdoc["kind"], np.asarray(tdoc["center"], dtype=float),
                                    np.asarray(tdoc["scale"], dtype=float))
    pairs = []
    for pdoc in doc["pairs"]:
        if "kernel" in pdoc:
            kdoc = pdoc["kernel"]
            kernel = KernelModel(
                alpha=np.asarray(kdoc["alpha"], dtype=float),
                gamma=float(kdoc["gamma"]),
                train_features=np.asarray(kdoc["train_features"], dtype=float),
                train_labels=np.asarray(kdoc["train_labels"], dtype=float),
            )
            pairs.append(PairClassifier(int(pdoc["positive"]), int(pdoc["negative"]),
                                        kernel=kernel))
        else:
            pairs.append(PairClassifier(int(pdoc["positive"]), int(pdoc["negative"]),
                                        coef=np.asarray(pdoc["coef"], dtype=float)))
    ovo = OVOModel(pairs=pairs, class_names=tuple(doc["class_names"]))
    return SavedModel(ovo=ovo, transform=transform)
