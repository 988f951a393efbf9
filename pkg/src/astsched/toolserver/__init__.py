"""The agent-facing boundary: JSON-RPC stdio tool server and batch CLI."""

from .catalog import MAX_TRACK_POINTS, PAGE_SIZE, TOOLS, tool_descriptors
from .cli import main
from .server import STATE_DIR_ENV, ToolServer, default_state_path, serve

__all__ = [
    "MAX_TRACK_POINTS", "PAGE_SIZE", "TOOLS", "tool_descriptors",
    "main", "STATE_DIR_ENV", "ToolServer", "default_state_path", "serve",
]
