from typing import TypedDict

from dilma.errors.error_codes import DilmaErrorCodes


class ErrorResponse(TypedDict, total=False):
    errorId: str | DilmaErrorCodes
    exitCode: int  # default to 1 if not provided
    debugMessage: str | None


class DilmaError(ValueError):
    def __init__(self, error_response: ErrorResponse):
        if "exitCode" not in error_response:
            error_response["exitCode"] = 1
        self.error_response = error_response
        super().__init__(error_response.get("debugMessage") or str(error_response.get("errorId")))

    @property
    def error_id(self) -> str:
        return str(self.error_response.get("errorId", DilmaErrorCodes.UNEXPECTED_ERROR))

    @property
    def exit_code(self) -> int:
        return self.error_response.get("exitCode", 1) or 1


def dilma_error(
    error_id: str | DilmaErrorCodes = DilmaErrorCodes.UNEXPECTED_ERROR,
    debug_message: str | None = None,
    exit_code: int = 1,
) -> DilmaError:
    return DilmaError(
        error_response={
            "errorId": error_id,
            "exitCode": exit_code,
            "debugMessage": debug_message,
        }
    )


def construct_dilma_error(
    exception: Exception,
    error_id: str | DilmaErrorCodes = DilmaErrorCodes.UNEXPECTED_ERROR,
    exit_code: int | None = None,
) -> DilmaError:
    """
    Constructs a DilmaError from the given exception, error ID, and exit code.

    Parameters:
        exception (Exception): The original exception that occurred.
        error_id (str | DilmaErrorCodes): A string or enum value representing the error ID
        exit_code (int | None): An optional process exit code for the error.

    Returns:
        DilmaError: An exception containing the structured error response.
    """
    if isinstance(exception, DilmaError):
        return exception

    error_response: ErrorResponse = {"errorId": error_id, "exitCode": exit_code or 1}

    debug_message = str(exception) if exception is not None else None

    if debug_message is not None:
        error_response["debugMessage"] = debug_message

    return DilmaError(error_response)
