"""Persistence, configuration, CLI and the HTTP service."""

from .config import AppConfig, load_config
from .store import FileStore, RunRecord

__all__ = ["AppConfig", "load_config", "FileStore", "RunRecord"]
