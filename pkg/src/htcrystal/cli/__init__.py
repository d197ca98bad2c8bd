from .config import ConfigError, CrystalConfig, format_config, parse_config
from .main import main
from .selftest import run_selftest
