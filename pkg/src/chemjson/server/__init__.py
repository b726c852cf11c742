"""HTTP data service: file store, metadata index and REST endpoints."""

from .app import ServerConfig, authenticate_request, create_app, serve
from .metadata import Metadata, detect_format, extract_metadata, load_document
from .store import FileStore, StoredMolecule, content_id

__all__ = [
    "ServerConfig",
    "authenticate_request",
    "create_app",
    "serve",
    "Metadata",
    "detect_format",
    "extract_metadata",
    "load_document",
    "FileStore",
    "StoredMolecule",
    "content_id",
]
