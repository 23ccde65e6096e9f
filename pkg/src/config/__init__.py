"""
Configuration module

Provides functionality for loading and accessing configuration.
"""

from .config_loader import ConfigLoader
