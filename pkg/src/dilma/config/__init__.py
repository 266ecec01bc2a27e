from .generate_run_config import generate_run_config_example
from .run_config import ENV_PREFIX, AbstractRunConfig, RunConfig, RunConfigError

__all__ = ["ENV_PREFIX", "AbstractRunConfig", "RunConfig", "RunConfigError", "generate_run_config_example"]
