from .error_codes import DilmaErrorCodes
from .error_exception import DilmaError, ErrorResponse, construct_dilma_error, dilma_error
from .error_handler import handle_cli_error

__all__ = [
    "DilmaError",
    "DilmaErrorCodes",
    "ErrorResponse",
    "construct_dilma_error",
    "dilma_error",
    "handle_cli_error",
]
