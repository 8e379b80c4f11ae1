from . import load_solver_config
from .load_solver_config import ConfigManager, SolverSettings, get_config_from_env

__all__ = ["load_solver_config", "ConfigManager", "SolverSettings", "get_config_from_env"]
