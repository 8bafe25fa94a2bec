"""Base output-store protocol and types for experiment artifacts."""

import io
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import IO, List, Optional, Protocol, Union


@dataclass
class StorageWriteParams:
    """Parameters for writing an artifact."""

    key: str
    body: Union[str, bytes]
    content_type: Optional[str] = None


@dataclass
class StorageReadParams:
    """Parameters for reading an artifact."""

    key: str


@dataclass
class StorageWriteResult:
    """Result of a write."""

    key: str
    url: Optional[str] = None


class StorageAdapter(Protocol):
    """
    Protocol for stores that hold experiment outputs: instance files,
    manifests, metric tables and fixed-parameter tables.

    Implementations provide pluggable backends (filesystem, S3) behind one
    interface so commands never touch paths directly.
    """

    def write(self, params: StorageWriteParams) -> StorageWriteResult:
        """
        Write an artifact, replacing any previous content under the key.

        Args:
            params: Write parameters including key, body, and optional content type

        Returns:
            StorageWriteResult with the key and optional URL
        """
        ...

    def read_text(self, params: StorageReadParams) -> str:
        """
        Read an artifact as text.

        Raises:
            FileNotFoundError: If the key does not exist
        """
        ...

    def open_read_stream(self, params: StorageReadParams) -> IO[bytes]:
        ...

    def exists(self, key: str) -> bool:
        ...

    def list_keys(self, prefix: str = "") -> List[str]:
        """
        List stored keys under a prefix, sorted.

        Args:
            prefix: Key prefix such as ``"instances/"``
        """
        ...

    def resolve_key(self, name: str) -> str:
        """
        Resolve a logical name to a fully-qualified key.

        Args:
            name: The logical name to resolve

        Returns:
            The key with any prefix applied and traversal segments removed
        """
        ...

    def __str__(self) -> str:
        """
        Human-readable identifier, e.g. ``file:///runs/exp1`` or ``s3://bucket/prefix``.
        """
        ...


class BaseStorageAdapter(ABC):
    """Abstract base class for output stores with common functionality."""

    @abstractmethod
    def write(self, params: StorageWriteParams) -> StorageWriteResult:
        pass

    @abstractmethod
    def read_text(self, params: StorageReadParams) -> str:
        pass

    def open_read_stream(self, params: StorageReadParams) -> IO[bytes]:
        """
        Default implementation that reads all text and returns a BytesIO stream.
        Subclasses should override for more efficient streaming.
        """
        return io.BytesIO(self.read_text(params).encode("utf-8"))

    def exists(self, key: str) -> bool:
        try:
            self.read_text(StorageReadParams(key=key))
        except FileNotFoundError:
            return False
        return True

    @abstractmethod
    def list_keys(self, prefix: str = "") -> List[str]:
        pass

    @abstractmethod
    def resolve_key(self, name: str) -> str:
        pass

    @abstractmethod
    def __str__(self) -> str:
        pass


def sanitize_key(name: str) -> str:
    """Strip traversal segments and leading slashes from a key."""
    parts = [p for p in name.replace("\\", "/").split("/") if p not in ("", ".", "..")]
    return "/".join(parts)
