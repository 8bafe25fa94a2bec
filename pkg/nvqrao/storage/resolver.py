"""Output-store resolution from URIs and paths."""

import tempfile
from pathlib import Path
from typing import Optional, Union
from urllib.parse import urlparse

from ..adapters.base import StorageAdapter
from ..adapters.filesystem import FileStorageAdapter, file_uri_to_options


def create_storage_adapter(
    uri_or_adapter: Optional[Union[str, Path, StorageAdapter]] = None
) -> StorageAdapter:
    """
    Create or return an output store.

    Args:
        uri_or_adapter: Either:
            - A URI string (``file:///path``, ``s3://bucket/prefix``)
            - A plain filesystem path
            - An existing StorageAdapter instance
            - None (a fresh temporary directory)

    Returns:
        A StorageAdapter instance

    Raises:
        ValueError: If the URI scheme is not supported
        ImportError: For ``s3://`` without boto3 installed
    """
    if uri_or_adapter is not None and hasattr(uri_or_adapter, "write"):
        return uri_or_adapter  # type: ignore[return-value]

    if uri_or_adapter is None:
        return FileStorageAdapter(base_dir=tempfile.mkdtemp(prefix="nvqrao_"))

    if isinstance(uri_or_adapter, Path):
        return FileStorageAdapter(base_dir=uri_or_adapter)

    uri = str(uri_or_adapter)
    parsed = urlparse(uri)

    if parsed.scheme == "file":
        return FileStorageAdapter(**file_uri_to_options(uri))
    elif parsed.scheme == "s3":
        try:
            from ..adapters.s3 import S3StorageAdapter, s3_uri_to_options
        except ImportError:
            raise ImportError("S3 storage requires boto3. Install with: pip install nvqrao[s3]")
        return S3StorageAdapter(s3_uri_to_options(uri))
    elif parsed.scheme == "" or (len(parsed.scheme) == 1 and uri[1:3] in (":\\", ":/")):
        # Plain path, including Windows drive letters
        return FileStorageAdapter(base_dir=uri)
    else:
        raise ValueError(f"Unsupported storage URI scheme: {parsed.scheme}")
