"""Thin synchronous client SDK for the astsched tool server."""

from .client import (
    CatalogMismatchError,
    SessionHandle,
    SpawnError,
    ToolError,
    TransportError,
    connect,
    pinned_catalog,
)

__all__ = [
    "CatalogMismatchError",
    "SessionHandle",
    "SpawnError",
    "ToolError",
    "TransportError",
    "connect",
    "pinned_catalog",
]
