"""Filesystem output store."""

import os
import tempfile
from pathlib import Path
from typing import IO, List, Optional, Union
from urllib.parse import urlparse
from urllib.request import url2pathname

from .base import (
    BaseStorageAdapter,
    StorageReadParams,
    StorageWriteParams,
    StorageWriteResult,
    sanitize_key,
)


class FileStorageAdapter(BaseStorageAdapter):
    """
    Store that writes artifacts under a base directory.

    Writes go to a temporary file in the target directory and are renamed
    into place, so a reader never sees a half-written CSV or JSON file.
    """

    def __init__(self, base_dir: Union[str, Path], prefix: Optional[str] = None):
        """
        Initialize a filesystem store.

        Args:
            base_dir: Base directory for outputs (created if missing)
            prefix: Optional subdirectory inside base_dir
        """
        self.base_dir = Path(base_dir).resolve()
        self.prefix = sanitize_key(prefix or "")
        self.base_dir.mkdir(parents=True, exist_ok=True)

    def resolve_key(self, name: str) -> str:
        safe_name = sanitize_key(name)
        if self.prefix:
            return f"{self.prefix}/{safe_name}"
        return safe_name

    def _path(self, key: str) -> Path:
        return self.base_dir / sanitize_key(key)

    def write(self, params: StorageWriteParams) -> StorageWriteResult:
        full_path = self._path(params.key)
        full_path.parent.mkdir(parents=True, exist_ok=True)

        data = params.body.encode("utf-8") if isinstance(params.body, str) else params.body
        fd, tmp_name = tempfile.mkstemp(dir=full_path.parent, prefix=f".{full_path.name}.")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
            os.replace(tmp_name, full_path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise

        return StorageWriteResult(key=params.key, url=full_path.as_uri())

    def read_text(self, params: StorageReadParams) -> str:
        full_path = self._path(params.key)
        if not full_path.is_file():
            raise FileNotFoundError(f"File not found: {params.key}")
        return full_path.read_text(encoding="utf-8")

    def open_read_stream(self, params: StorageReadParams) -> IO[bytes]:
        full_path = self._path(params.key)
        if not full_path.is_file():
            raise FileNotFoundError(f"File not found: {params.key}")
        return open(full_path, "rb")

    def exists(self, key: str) -> bool:
        return self._path(key).is_file()

    def list_keys(self, prefix: str = "") -> List[str]:
        keys = []
        for path in self.base_dir.rglob("*"):
            if not path.is_file() or path.name.startswith("."):
                continue
            key = path.relative_to(self.base_dir).as_posix()
            if key.startswith(prefix):
                keys.append(key)
        return sorted(keys)

    def __str__(self) -> str:
        base_uri = self.base_dir.as_uri()
        if self.prefix:
            return f"{base_uri.rstrip('/')}/{self.prefix}"
        return base_uri


def file_uri_to_options(uri: str) -> dict:
    """
    Parse a file:// URI into FileStorageAdapter options.

    Raises:
        ValueError: If the URI is not a file:// URI
    """
    parsed = urlparse(uri)
    if parsed.scheme != "file":
        raise ValueError(f"Invalid file URI: {uri}")

    path = url2pathname(parsed.path)
    # url2pathname can return '\C:\path' on Windows
    if os.name == "nt" and path.startswith("\\"):
        path = path[1:]

    return {"base_dir": path}
