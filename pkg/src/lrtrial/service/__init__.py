from .app import create_app
from .store import (
    SessionRecord,
    SessionStoppedError,
    SessionStore,
    UnknownSessionError,
    VersionConflictError,
)

__all__ = [
    "create_app",
    "SessionRecord",
    "SessionStore",
    "SessionStoppedError",
    "UnknownSessionError",
    "VersionConflictError",
]
