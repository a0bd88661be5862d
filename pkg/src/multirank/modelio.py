"""Versioned JSON model files.

Floats are written with ``repr`` precision so a load/save round trip reproduces
every score bit for bit. Output is key-sorted and carries no timestamps, which
makes identical models serialize to identical bytes.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .coding import Scheme, build_coding_matrix
from .ensemble import MultiRankModel, WeightingScheme
from .rankboost import BipartiteRanker, BoostRound, TrainConfig, z_bound
from .stump import Stump, ThresholdPolicy

__all__ = ["FORMAT_VERSION", "ModelFormatError", "ModelVersionError", "dumps", "loads", "save_model", "load_model"]

FORMAT_VERSION = 1
_MAGIC = "multirank-model"


class ModelFormatError(ValueError):
    pass


class ModelVersionError(ModelFormatError):
    pass


def to_dict(m: MultiRankModel) -> dict:
    columns = []
    for ranker, t in zip(m.rankers, m.weights):
        if ranker is None:
            columns.append({"skipped": True, "weight": 0.0, "feature_dimension": 0, "rounds": []})
            continue
        columns.append(
            {
                "skipped": False,
                "weight": t,
                "feature_dimension": ranker.feature_dimension,
                "rounds": [
                    {
                        "feature": rd.stump.feature,
                        "threshold": rd.stump.threshold,
                        "r0": rd.stump.default,
                        "alpha": rd.alpha,
                        "r": rd.r,
                    }
                    for rd in ranker.rounds
                ],
            }
        )
    return {
        "format": _MAGIC,
        "format_version": FORMAT_VERSION,
        "L": m.L,
        "coding": {
            "scheme": m.coding.scheme.value,
            "matrix": m.coding.entries.tolist(),
            "column_meta": [list(p) for p in m.coding.column_meta],
        },
        "columns": columns,
        "config": {
            "rounds": m.config.num_rounds,
            "thresholds": str(m.config.threshold_policy),
            "early_stop_on_zero_r": m.config.early_stop_on_zero_r,
            "weighting": m.weighting.kind.value,
            "holdout_fraction": m.weighting.holdout_fraction,
            "holdout_repetitions": m.weighting.repetitions,
            "seed": m.seed,
        },
    }


def dumps(m: MultiRankModel) -> str:
    return json.dumps(to_dict(m), indent=1, sort_keys=True, allow_nan=False) + "\n"


def _need(obj: dict, key: str, types):
    if not isinstance(obj, dict) or key not in obj:
        raise ModelFormatError(f"missing field {key!r}")
    val = obj[key]
    if isinstance(val, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        raise ModelFormatError(f"field {key!r} has wrong type")
    if not isinstance(val, types):
        raise ModelFormatError(f"field {key!r} has wrong type")
    return val


def _finite(obj: dict, key: str) -> float:
    val = float(_need(obj, key, (int, float)))
    if not math.isfinite(val):
        raise ModelFormatError(f"field {key!r} is not finite")
    return val


def from_dict(doc: dict) -> MultiRankModel:
    if not isinstance(doc, dict) or doc.get("format") != _MAGIC:
        raise ModelFormatError("not a multirank model file")
    version = _need(doc, "format_version", int)
    if version != FORMAT_VERSION:
        raise ModelVersionError(f"unsupported model format_version {version} (this build reads {FORMAT_VERSION})")
    try:
        L = _need(doc, "L", int)
        coding_doc = _need(doc, "coding", dict)
        coding = build_coding_matrix(L, Scheme.parse(_need(coding_doc, "scheme", str)))
        if not np.array_equal(np.array(_need(coding_doc, "matrix", list)), coding.entries):
            raise ModelFormatError("stored coding matrix does not match its scheme")
        if [tuple(p) for p in coding_doc.get("column_meta", [])] != list(coding.column_meta):
            raise ModelFormatError("stored column pairs do not match the coding scheme")

        cfg_doc = _need(doc, "config", dict)
        cfg = TrainConfig(
            _need(cfg_doc, "rounds", int),
            ThresholdPolicy.parse(_need(cfg_doc, "thresholds", str)),
            _need(cfg_doc, "early_stop_on_zero_r", bool),
        )
        weighting = WeightingScheme(
            _need(cfg_doc, "weighting", str),
            _finite(cfg_doc, "holdout_fraction"),
            _need(cfg_doc, "holdout_repetitions", int),
        )
        seed = _need(cfg_doc, "seed", int)

        rankers, weights = [], []
        cols = _need(doc, "columns", list)
        if len(cols) != coding.k:
            raise ModelFormatError(f"expected {coding.k} columns, found {len(cols)}")
        for col in cols:
            if _need(col, "skipped", bool):
                rankers.append(None)
                weights.append(_finite(col, "weight"))
                continue
            rounds = []
            for rd in _need(col, "rounds", list):
                alpha = _finite(rd, "alpha")
                r = _finite(rd, "r") if "r" in rd else math.tanh(alpha)
                stump = Stump(_need(rd, "feature", int), _finite(rd, "threshold"), _need(rd, "r0", int))
                rounds.append(BoostRound(stump, alpha, r, z_bound(r)))
            rankers.append(BipartiteRanker(tuple(rounds), _need(col, "feature_dimension", int)))
            weights.append(_finite(col, "weight"))
        return MultiRankModel(coding, tuple(rankers), tuple(weights), cfg, weighting, seed)
    except ModelFormatError:
        raise
    except (ValueError, TypeError) as exc:
        raise ModelFormatError(f"invalid model: {exc}") from exc


def loads(text: str) -> MultiRankModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"corrupt model file: {exc}") from exc
    return from_dict(doc)


def save_model(m: MultiRankModel, path) -> None:
    Path(path).write_text(dumps(m), encoding="utf-8")


def load_model(path) -> MultiRankModel:
    return loads(Path(path).read_text(encoding="utf-8"))
