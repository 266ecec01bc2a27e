import json
import sys
from typing import TextIO

from dilma.errors.error_codes import DilmaErrorCodes
from dilma.errors.error_exception import DilmaError


def handle_cli_error(exc: BaseException, stream: TextIO | None = None) -> int:
    """
    Render an exception raised by a subcommand as one machine-readable line on standard error.

    If `exc` is a `DilmaError`, its `error_response` payload is written and its exit code returned.
    Otherwise the line carries `errorId` `UNEXPECTED_ERROR`, exit code 1, and the exception string.

    Parameters:
        exc (BaseException): The exception that ended the subcommand.
        stream (TextIO | None): Where to write; defaults to standard error.

    Returns:
        int: The process exit code, always nonzero.
    """
    out = stream if stream is not None else sys.stderr

    if isinstance(exc, DilmaError):
        payload = {
            "errorId": exc.error_id,
            "exitCode": exc.exit_code,
            "debugMessage": exc.error_response.get("debugMessage"),
        }
    else:
        payload = {"errorId": DilmaErrorCodes.UNEXPECTED_ERROR.value, "exitCode": 1, "debugMessage": str(exc)}

    # A single line: newlines inside messages are escaped by json.dumps.
    out.write(json.dumps(payload, ensure_ascii=False) + "\n")
    out.flush()
    return int(payload["exitCode"])
