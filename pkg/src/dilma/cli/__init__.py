from .main import build_parser, main
from .workspace import Workspace

__all__ = ["Workspace", "build_parser", "main"]
