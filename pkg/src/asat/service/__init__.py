from .app import ApiError, create_app
from .state import ConfigError, RuntimeState, load_runtime

__all__ = ["ApiError", "ConfigError", "RuntimeState", "create_app", "load_runtime"]
