"""Output-store utilities for nvqrao."""

from .resolver import create_storage_adapter

__all__ = [
    "create_storage_adapter",
]
