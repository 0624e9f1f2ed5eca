"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigError(ValueError):
    """A scenario or configuration value is invalid.

    ``field`` names the offending section/key (e.g. ``"battery.capacity_ah"``).
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class BoostOverCurrent(Exception):
    """Requested 5 V output exceeds the regulator's current limit."""


class RegulatorDropout(Exception):
    """Boost input voltage is below the regulator's minimum operating voltage."""


class CsvFormatError(ValueError):
    """A CSV file does not follow the output contract."""
