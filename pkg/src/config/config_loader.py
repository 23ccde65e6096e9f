"""
Configuration loader module

Loads config from files and environment variables.
"""

import os
import json
import logging
from pathlib import Path

logger = logging.getLogger(__name__)

# Default configuration values - used as fallbacks
DEFAULT_EVAL_TOL = 1e-9
DEFAULT_MASS_TOL = 1e-12
DEFAULT_LP_TOL = 1e-7
DEFAULT_MERGE_TOL = 1e-12

DEFAULT_STRUCTURED_LIMIT = 14
DEFAULT_GUESS_NODE_LIMIT = 1 << 20
DEFAULT_TABULAR_LIMIT = 3
DEFAULT_TO_TABULAR_LIMIT = 6
DEFAULT_ALG_OPT_LIMIT = 20
DEFAULT_IC_OPT_LIMIT = 3
DEFAULT_SEQUENTIAL_LIMIT = 20
DEFAULT_LP_SIZE_LIMIT = 5000

DEFAULT_LOG_LEVEL = 'INFO'
DEFAULT_LOG_FILE = None
DEFAULT_LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DEFAULT_JOBS = 1
DEFAULT_MC_PATHS = 100_000
DEFAULT_SEED = 0

# env var -> (section, key, converter)
ENV_OVERRIDES = {
    'KSS_LOG_LEVEL': ('logging', 'level', str),
    'KSS_LOG_FILE': ('logging', 'file', str),
    'KSS_LOG_FORMAT': ('logging', 'format', str),
    'KSS_JOBS': ('bench', 'jobs', int),
    'KSS_EVAL_TOL': ('tolerance', 'eval', float),
    'KSS_LP_TOL': ('tolerance', 'lp', float),
    'KSS_STRUCTURED_LIMIT': ('limits', 'structured_tasks', int),
    'KSS_TABULAR_LIMIT': ('limits', 'tabular_tasks', int),
    'KSS_IC_OPT_LIMIT': ('limits', 'ic_opt_tasks', int),
    'KSS_MC_PATHS': ('simulation', 'paths', int),
}


class ConfigLoader:
    """
    Loads configuration from different sources with priority:
    1. Explicitly provided config_file
    2. Config file in standard locations
    3. Environment variables
    4. Default values
    """

    def __init__(self, config_file=None, search=True):
        """
        Initialize the configuration loader

        Args:
            config_file: Path to config file (optional)
            search: Look in the standard locations when no file is given
        """
        self.config_file = config_file or (self._find_config_file() if search else None)
        self.config = self._load_config()
        self._validate_config()

    def _find_config_file(self):
        """Find config file in standard locations"""
        locations = [
            os.path.join(os.getcwd(), 'config.json'),
            os.path.join(os.getcwd(), 'config', 'config.json'),
            os.path.expanduser('~/.knapsack-scoring/config.json'),
            os.path.join(os.getcwd(), '.env'),
        ]

        # Also check up to 3 parent directories
        cwd = Path(os.getcwd())
        for parent in list(cwd.parents)[:3]:
            locations.append(str(parent / 'config.json'))
            locations.append(str(parent / 'config' / 'config.json'))

        for location in locations:
            if os.path.exists(location):
                logger.info(f"Found config file at: {location}")
                return location

        logger.debug("No config file found, using environment variables and defaults")
        return None

    def _parse_env_file(self, env_file):
        """Parse a .env file into a dict"""
        result = {}

        try:
            with open(env_file, 'r') as f:
                for line in f:
                    line = line.strip()
                    if not line or line.startswith('#') or '=' not in line:
                        continue

                    key, value = line.split('=', 1)
                    key = key.strip()
                    value = value.strip()

                    # Remove quotes if present
                    if value.startswith(('"', "'")) and value.endswith(value[0]):
                        value = value[1:-1]

                    result[key] = value

            logger.debug(f"Loaded {len(result)} values from .env file")
        except Exception as e:
            logger.error(f"Error parsing .env file: {e}")

        return result

    def _defaults(self):
        return {
            'tolerance': {
                'eval': DEFAULT_EVAL_TOL,
                'mass': DEFAULT_MASS_TOL,
                'lp': DEFAULT_LP_TOL,
                'merge': DEFAULT_MERGE_TOL,
            },
            'limits': {
                'structured_tasks': DEFAULT_STRUCTURED_LIMIT,
                'guess_nodes': DEFAULT_GUESS_NODE_LIMIT,
                'tabular_tasks': DEFAULT_TABULAR_LIMIT,
                'to_tabular_tasks': DEFAULT_TO_TABULAR_LIMIT,
                'alg_opt_tasks': DEFAULT_ALG_OPT_LIMIT,
                'ic_opt_tasks': DEFAULT_IC_OPT_LIMIT,
                'sequential_tasks': DEFAULT_SEQUENTIAL_LIMIT,
                'lp_size': DEFAULT_LP_SIZE_LIMIT,
            },
            'logging': {
                'level': DEFAULT_LOG_LEVEL,
                'file': DEFAULT_LOG_FILE,
                'format': DEFAULT_LOG_FORMAT,
            },
            'bench': {
                'jobs': DEFAULT_JOBS,
                'ic_opt_max_n': DEFAULT_IC_OPT_LIMIT,
                'timing': False,
            },
            'simulation': {
                'paths': DEFAULT_MC_PATHS,
                'seed': DEFAULT_SEED,
            },
        }

    def _apply_overrides(self, config, values):
        """Map flat KSS_* values onto the config structure"""
        for env_key, (section, key, convert) in ENV_OVERRIDES.items():
            if env_key not in values or values[env_key] in (None, ''):
                continue
            try:
                config[section][key] = convert(values[env_key])
            except ValueError:
                logger.warning(f"Ignoring {env_key}={values[env_key]!r}: expected {convert.__name__}")

    def _load_config(self):
        """Load configuration from all sources"""
        config = self._defaults()
        self._apply_overrides(config, os.environ)

        # Override with file settings if available
        if self.config_file and os.path.exists(self.config_file):
            try:
                if self.config_file.endswith('.env'):
                    self._apply_overrides(config, self._parse_env_file(self.config_file))
                else:
                    with open(self.config_file, 'r') as f:
                        file_config = json.load(f)
                    self._deep_merge(config, file_config)

                logger.info(f"Loaded configuration from {self.config_file}")
            except Exception as e:
                logger.error(f"Error loading config file: {e}")

        return config

    def _deep_merge(self, target, source):
        """Deep merge two dictionaries"""
        for key, value in source.items():
            if key in target and isinstance(target[key], dict) and isinstance(value, dict):
                self._deep_merge(target[key], value)
            else:
                target[key] = value

    def _validate_config(self):
        """Do basic validation of the config"""
        required = {
            'tolerance': ['eval', 'mass', 'lp'],
            'limits': ['structured_tasks', 'tabular_tasks', 'ic_opt_tasks'],
            'logging': ['level'],
            'bench': ['jobs'],
        }

        # Just log warnings - we have defaults for everything
        for section, keys in required.items():
            if section not in self.config:
                logger.warning(f"Missing config section: {section}")
                continue

            for key in keys:
                if self.config[section].get(key) is None:
                    logger.warning(f"Missing required config value: {section}.{key}")

        for key, value in self.config.get('tolerance', {}).items():
            if isinstance(value, (int, float)) and value <= 0:
                logger.warning(f"Non-positive tolerance {key}={value}")

    def get_tolerance_config(self):
        """Get numeric tolerances"""
        return self.config.get('tolerance', {})

    def get_limits_config(self):
        """Get oracle size limits"""
        return self.config.get('limits', {})

    def get_logging_config(self):
        """Get logging configuration"""
        return self.config.get('logging', {})

    def get_bench_config(self):
        """Get benchmark configuration"""
        return self.config.get('bench', {})

    def get_simulation_config(self):
        """Get Monte-Carlo configuration"""
        return self.config.get('simulation', {})

    def get_config(self, section=None):
        """
        Get configuration

        Args:
            section: Section name or None for entire config
        """
        if section:
            return self.config.get(section, {})
        return self.config

    def print_config_summary(self):
        """Print a summary of the configuration (useful for debugging)"""
        print("\nConfiguration Summary:")
        print(json.dumps(self.config, indent=2))
        print()
