"""Development traceback renderer for attack and training runs.

Rich renders the stack without locals. Below it, the locals of frames from
pipeline code are listed, with models, tensors and token sequences reduced
to a one-line summary so a failing attack step stays readable.
"""

import inspect
import os
import traceback
from collections.abc import Iterator
from dataclasses import dataclass
from io import StringIO
from types import TracebackType
from typing import Any, TextIO

from rich.console import Console
from rich.rule import Rule
from rich.text import Text
from rich.traceback import Traceback

DEFAULT_USER_CODE_PATHS = ("dilma", "src/", "tests/")
SEQUENCE_PREVIEW = 8

type ExcInfo = tuple[type[BaseException], BaseException, TracebackType | None]


def _get_user_code_paths() -> tuple[str, ...]:
    """Defaults plus the comma-separated LOGGER_USER_CODE_PATHS."""
    extra = tuple(p.strip() for p in os.getenv("LOGGER_USER_CODE_PATHS", "").split(",") if p.strip())
    return DEFAULT_USER_CODE_PATHS + extra


@dataclass(frozen=True, slots=True)
class UserFrame:
    path: str
    lineno: int
    function: str
    variables: dict[str, Any]

    @property
    def short_path(self) -> str:
        return "/".join(self.path.split("/")[-3:])


def _user_frames(tb: TracebackType | None) -> Iterator[UserFrame]:
    paths = _get_user_code_paths()
    for frame, lineno in traceback.walk_tb(tb):
        filename = frame.f_code.co_filename
        if any(path in filename for path in paths):
            yield UserFrame(filename, lineno, frame.f_code.co_name, dict(frame.f_locals))


def _is_noise(name: str, value: Any) -> bool:
    if name.startswith("_") or name == "cls":
        return True
    return inspect.isroutine(value) or inspect.isclass(value) or inspect.ismodule(value)


def summarize_local(value: Any, max_len: int) -> str:
    """
    One-line description of a local variable.

    Tensors and arrays show shape and dtype, modules their parameter count and
    mode, token sequences their length and leading ids. Anything else falls
    back to a truncated repr.
    """
    kind = type(value).__name__
    if hasattr(value, "shape") and hasattr(value, "dtype"):
        grad = " grad" if getattr(value, "requires_grad", False) else ""
        return f"<{kind} shape={tuple(value.shape)} dtype={value.dtype}{grad}>"
    if hasattr(value, "named_parameters") and hasattr(value, "training"):
        count = sum(p.numel() for p in value.parameters())
        mode = "train" if value.training else "eval"
        return f"<{kind} params={count} {mode}>"
    if isinstance(getattr(value, "ids", None), tuple):
        ids = value.ids
        preview = ", ".join(str(i) for i in ids[:SEQUENCE_PREVIEW]) + (", ..." if len(ids) > SEQUENCE_PREVIEW else "")
        return f"<{kind} len={len(ids)} ids=({preview})>"
    try:
        text = repr(value)
    except Exception:
        return f"<{kind}: repr failed>"
    return text if len(text) <= max_len else text[:max_len] + "..."


class FocusedTracebackFormatter:
    """
    structlog exception formatter used in development when DEV_TRACEBACK_STYLE=focused.

    Frames whose file path contains one of DEFAULT_USER_CODE_PATHS, or a path
    listed in LOGGER_USER_CODE_PATHS, get a locals listing; torch and other
    library frames only appear in the Rich stack.
    """

    def __init__(self, width: int = 100, max_frames: int = 50, locals_max_string: int = 80) -> None:
        self.width = width
        self.max_frames = max_frames
        self.locals_max_string = locals_max_string

    def __call__(self, sio: TextIO, exc_info: ExcInfo) -> None:
        buffer = StringIO()
        console = Console(file=buffer, force_terminal=True, width=self.width)
        console.print(Traceback.from_exception(*exc_info, width=self.width, max_frames=self.max_frames, show_locals=False))

        frames = list(_user_frames(exc_info[2]))
        if frames:
            console.print(Rule(Text("Local variables in your code", style="bold cyan"), style="cyan"))
            for frame in frames:
                self._print_frame(console, frame)
        sio.write(buffer.getvalue())

    def _print_frame(self, console: Console, frame: UserFrame) -> None:
        console.print(Text(f"► {frame.short_path}:{frame.lineno} in {frame.function}()", style="bold yellow"))
        shown = {name: value for name, value in frame.variables.items() if not _is_noise(name, value)}
        if not shown:
            console.print(Text("  (no relevant local variables)", style="dim"))
            return
        for name, value in shown.items():
            console.print(
                Text.assemble("  ", (name, "green"), " = ", summarize_local(value, self.locals_max_string)),
                overflow="ellipsis",
                no_wrap=True,
            )
