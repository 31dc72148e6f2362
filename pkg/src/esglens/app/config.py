"""One structured configuration file for every module.

Precedence: built-in defaults < config file (path from --config or the
ESGLENS_CONFIG environment variable) < --set key=value overrides. The
effective config has a stable digest used in run records so replayed stages
can prove they ran under identical settings.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from ..corpus import SplitterConfig
from ..embed import ProviderKind, ProviderSpec
from ..errors import ConfigError
from ..extract import LlmRequestConfig, Strategy
from ..index import RetrievalConfig
from ..score import GbtConfig, MlpConfig
from ..trace import TraceConfig

ENV_VAR = "ESGLENS_CONFIG"

DEFAULTS: Dict[str, Any] = {
    "data_dir": "data",
    "provider": {
        "kind": "local",
        "dimension": 256,
        "endpoint_url": "",
        "model_name": "",
        "seed": 0,
        "batch_size": 16,
        "max_retries": 3,
    },
    "cache": {"path": ""},
    "splitter": {"chunk_size": 1000, "chunk_overlap": 200},
    "retrieval": {"k": 20},
    "llm": {
        "adapter": "rule",
        "endpoint_url": "",
        "model_name": "rule-based",
        "temperature": 0.0,
        "max_attempts": 3,
        "timeout": 60.0,
    },
    "extract": {"strategy": "s3", "context_budget": 12000},
    "trace": {
        "verify_threshold": 0.5,
        "leakage_threshold": 0.8,
        "ngram_n": 5,
        "page_window": 1,
    },
    "mlp": {
        "hidden_dims": [512, 512],
        "epochs": 50,
        "learning_rate": 0.001,
        "batch_size": 32,
        "seed": 0,
    },
    "gbt": {
        "max_bin": 512,
        "learning_rate": 0.01,
        "iterations": 50,
        "min_gain_to_split": 0.01,
        "feature_fraction": 0.8,
        "max_depth": 6,
        "min_samples_leaf": 20,
        "seed": 0,
    },
    "score": {"holdout_fraction": 0.2, "split_seed": 0},
}


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class AppConfig:
    def __init__(self, values: Dict[str, Any]):
        self.values = values

    def get(self, dotted: str, default=None):
        node: Any = self.values
        for part in dotted.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    @property
    def data_dir(self) -> Path:
        return Path(self.values["data_dir"])

    def digest(self) -> str:
        canonical = json.dumps(self.values, sort_keys=True, ensure_ascii=False,
                               separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def snapshot(self) -> Dict[str, Any]:
        return copy.deepcopy(self.values)

    # --- typed sections ------------------------------------------------------

    def provider_spec(self) -> ProviderSpec:
        section = self.values["provider"]
        kind = str(section["kind"]).lower()
        try:
            if kind in ("local", "localdeterministic"):
                return ProviderSpec(
                    provider_id=f"local-hash-{section['dimension']}-{section['seed']}",
                    kind=ProviderKind.LOCAL_DETERMINISTIC,
                    dimension=int(section["dimension"]),
                    seed=int(section["seed"]),
                    batch_size=int(section["batch_size"]),
                    max_retries=int(section["max_retries"]),
                )
            if kind in ("remote", "remotehttp"):
                return ProviderSpec(
                    provider_id=f"remote-{section['model_name']}",
                    kind=ProviderKind.REMOTE_HTTP,
                    dimension=int(section["dimension"]),
                    endpoint_url=section["endpoint_url"],
                    model_name=section["model_name"],
                    batch_size=int(section["batch_size"]),
                    max_retries=int(section["max_retries"]),
                )
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"invalid provider section: {exc}") from exc
        raise ConfigError(f"unknown provider.kind {section['kind']!r}")

    def cache_path(self) -> Optional[Path]:
        configured = self.values["cache"]["path"]
        if configured == "":
            return self.data_dir / "cache" / "embeddings.jsonl"
        if configured is None:
            return None
        return Path(configured)

    def splitter_config(self) -> SplitterConfig:
        section = self.values["splitter"]
        try:
            return SplitterConfig(chunk_size=int(section["chunk_size"]),
                                  chunk_overlap=int(section["chunk_overlap"]))
        except ValueError as exc:
            raise ConfigError(f"invalid splitter section: {exc}") from exc

    def retrieval_config(self, report_filter: Optional[str] = None) -> RetrievalConfig:
        try:
            return RetrievalConfig(k=int(self.values["retrieval"]["k"]),
                                   report_filter=report_filter)
        except ValueError as exc:
            raise ConfigError(f"invalid retrieval section: {exc}") from exc

    def llm_config(self) -> LlmRequestConfig:
        section = self.values["llm"]
        return LlmRequestConfig(
            endpoint_url=section["endpoint_url"],
            model_name=section["model_name"],
            temperature=float(section["temperature"]),
            max_attempts=int(section["max_attempts"]),
            timeout=float(section["timeout"]),
        )

    def strategy(self) -> Strategy:
        raw = str(self.values["extract"]["strategy"]).lower()
        try:
            return Strategy(raw)
        except ValueError as exc:
            raise ConfigError(f"unknown strategy {raw!r}") from exc

    def context_budget(self) -> int:
        return int(self.values["extract"]["context_budget"])

    def trace_config(self) -> TraceConfig:
        section = self.values["trace"]
        try:
            return TraceConfig(
                verify_threshold=float(section["verify_threshold"]),
                leakage_threshold=float(section["leakage_threshold"]),
                ngram_n=int(section["ngram_n"]),
                page_window=int(section["page_window"]),
            )
        except ValueError as exc:
            raise ConfigError(f"invalid trace section: {exc}") from exc

    def mlp_config(self, input_dim: int) -> MlpConfig:
        section = self.values["mlp"]
        try:
            return MlpConfig(
                input_dim=input_dim,
                hidden_dims=tuple(int(h) for h in section["hidden_dims"]),
                epochs=int(section["epochs"]),
                learning_rate=float(section["learning_rate"]),
                batch_size=int(section["batch_size"]),
                seed=int(section["seed"]),
            )
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"invalid mlp section: {exc}") from exc

    def gbt_config(self) -> GbtConfig:
        section = self.values["gbt"]
        try:
            return GbtConfig(
                max_bin=int(section["max_bin"]),
                learning_rate=float(section["learning_rate"]),
                iterations=int(section["iterations"]),
                min_gain_to_split=float(section["min_gain_to_split"]),
                feature_fraction=float(section["feature_fraction"]),
                max_depth=int(section["max_depth"]),
                min_samples_leaf=int(section["min_samples_leaf"]),
                seed=int(section["seed"]),
            )
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"invalid gbt section: {exc}") from exc


def _parse_override_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_override(values: Dict[str, Any], assignment: str) -> None:
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not key=value")
    dotted, raw = assignment.split("=", 1)
    parts = dotted.strip().split(".")
    node = values
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot override through scalar {part!r}")
    node[parts[-1]] = _parse_override_value(raw)


def load_config(path: Optional[str | Path] = None,
                overrides: Sequence[str] = ()) -> AppConfig:
    values = copy.deepcopy(DEFAULTS)
    effective_path = path or os.environ.get(ENV_VAR)
    if effective_path:
        file_path = Path(effective_path)
        if not file_path.exists():
            raise ConfigError(f"config file not found: {file_path}")
        try:
            loaded = json.loads(file_path.read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        values = _deep_merge(values, loaded)
    for assignment in overrides:
        apply_override(values, assignment)
    return AppConfig(values)
