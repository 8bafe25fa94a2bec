"""AWS S3 output store for experiment artifacts."""

from dataclasses import dataclass
from typing import BinaryIO, List, Optional
from urllib.parse import urlparse

from .base import StorageReadParams, StorageWriteParams, StorageWriteResult, sanitize_key


@dataclass
class S3StorageOptions:
    """Configuration options for the S3 store."""

    bucket: str
    prefix: Optional[str] = None
    region: Optional[str] = None
    aws_access_key_id: Optional[str] = None
    aws_secret_access_key: Optional[str] = None
    aws_session_token: Optional[str] = None
    endpoint_url: Optional[str] = None  # For S3-compatible services


class S3StorageAdapter:
    """Store that keeps experiment outputs as S3 objects under a prefix."""

    def __init__(self, options: S3StorageOptions):
        """
        Initialize the S3 store.

        Args:
            options: S3 configuration options

        Raises:
            ImportError: If boto3 is not installed
            ValueError: If the bucket cannot be reached
        """
        try:
            import boto3
        except ImportError:
            raise ImportError(
                "boto3 is required for S3 storage. Install with: pip install nvqrao[s3]"
            )

        self.bucket = options.bucket
        self.prefix = sanitize_key(options.prefix or "")

        client_kwargs = {"service_name": "s3"}
        if options.region:
            client_kwargs["region_name"] = options.region
        if options.endpoint_url:
            client_kwargs["endpoint_url"] = options.endpoint_url
        if options.aws_access_key_id and options.aws_secret_access_key:
            client_kwargs["aws_access_key_id"] = options.aws_access_key_id
            client_kwargs["aws_secret_access_key"] = options.aws_secret_access_key
            if options.aws_session_token:
                client_kwargs["aws_session_token"] = options.aws_session_token

        self.s3_client = boto3.client(**client_kwargs)

        try:
            self.s3_client.head_bucket(Bucket=self.bucket)
        except Exception as e:
            raise ValueError(f"Cannot access S3 bucket '{self.bucket}': {e}")

    def resolve_key(self, name: str) -> str:
        """
        Apply the prefix and strip traversal segments.

        Args:
            name: The logical key

        Returns:
            The S3 object key
        """
        safe_name = sanitize_key(name)
        if self.prefix:
            return f"{self.prefix}/{safe_name}"
        return safe_name

    def write(self, params: StorageWriteParams) -> StorageWriteResult:
        """
        Upload an artifact. ``put_object`` replaces objects atomically.

        Raises:
            IOError: If the upload fails
        """
        body = params.body.encode("utf-8") if isinstance(params.body, str) else params.body
        put_kwargs = {"Bucket": self.bucket, "Key": params.key, "Body": body}
        if params.content_type:
            put_kwargs["ContentType"] = params.content_type

        try:
            self.s3_client.put_object(**put_kwargs)
        except Exception as e:
            raise IOError(f"Failed to write to S3: {e}")

        return StorageWriteResult(key=params.key, url=f"s3://{self.bucket}/{params.key}")

    def read_text(self, params: StorageReadParams) -> str:
        """
        Download an artifact as text.

        Raises:
            FileNotFoundError: If the key does not exist
            IOError: For any other S3 failure
        """
        return self.open_read_stream(params).read().decode("utf-8")

    def open_read_stream(self, params: StorageReadParams) -> BinaryIO:
        try:
            response = self.s3_client.get_object(Bucket=self.bucket, Key=params.key)
        except self.s3_client.exceptions.NoSuchKey:
            raise FileNotFoundError(f"S3 key not found: {params.key}")
        except Exception as e:
            raise IOError(f"Failed to read from S3: {e}")
        return response["Body"]

    def exists(self, key: str) -> bool:
        try:
            self.s3_client.head_object(Bucket=self.bucket, Key=key)
        except Exception:
            return False
        return True

    def list_keys(self, prefix: str = "") -> List[str]:
        """List object keys under a prefix, following pagination."""
        paginator = self.s3_client.get_paginator("list_objects_v2")
        keys = []
        for page in paginator.paginate(Bucket=self.bucket, Prefix=prefix):
            keys.extend(obj["Key"] for obj in page.get("Contents", []))
        return sorted(keys)

    def __str__(self) -> str:
        if self.prefix:
            return f"s3://{self.bucket}/{self.prefix}"
        return f"s3://{self.bucket}"


def s3_uri_to_options(uri: str) -> S3StorageOptions:
    """
    Parse an S3 URI into store options.

    Examples:
        >>> s3_uri_to_options("s3://my-bucket")
        S3StorageOptions(bucket='my-bucket', prefix=None)

        >>> s3_uri_to_options("s3://my-bucket/runs/exp1")
        S3StorageOptions(bucket='my-bucket', prefix='runs/exp1')
    """
    parsed = urlparse(uri)
    if parsed.scheme != "s3":
        raise ValueError(f"Invalid S3 URI scheme: {uri}")

    bucket = parsed.netloc
    if not bucket:
        raise ValueError(f"No bucket specified in S3 URI: {uri}")

    prefix = parsed.path.lstrip("/") or None
    return S3StorageOptions(bucket=bucket, prefix=prefix)
