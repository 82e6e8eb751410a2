from __future__ import annotations

import logging
import os
from dataclasses import asdict, dataclass, field, replace

import yaml
from dotenv import load_dotenv

from lattice.errors import ConfigError

logger = logging.getLogger(__name__)

FORMATS = ("text", "structured")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
POSITIVE = ("degree_bound", "coeff_bound", "splitting_bound", "jobs", "max_components")

ENVIRONMENT = {
    "SYMSUM_DEGREE_BOUND": "degree_bound",
    "SYMSUM_COEFF_BOUND": "coeff_bound",
    "SYMSUM_SPLITTING_BOUND": "splitting_bound",
    "SYMSUM_JOBS": "jobs",
    "SYMSUM_FORMAT": "output_format",
    "SYMSUM_SEED": "seed",
    "SYMSUM_LOG_LEVEL": "log_level",
}


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by every command.

    Attributes:
        degree_bound (int): Bound for exceptional class searches.
        coeff_bound (int): Coefficient box of the knef oracle and the positive square scans.
        splitting_bound (int): Coefficient box of the splitting enumeration.
        jobs (int): Worker processes.
        output_format (str): ``text`` or ``structured``.
        seed (int): Seed for sampled checks.
        oracle (bool): Cross-check knef certificates against the oracle.
        max_components (int): Distinct sphere candidates per side of a splitting.
        log_level (str): Threshold of the stderr log handler.
    """

    degree_bound: int = 6
    coeff_bound: int = 10
    splitting_bound: int = 8
    jobs: int = field(default_factory=lambda: os.cpu_count() or 1)
    output_format: str = "text"
    seed: int = 20240101
    oracle: bool = False
    max_components: int = 1
    log_level: str = "WARNING"

    def __post_init__(self):
        for key in POSITIVE:
            value = getattr(self, key)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(f"\n{key} must be a positive integer, got {value!r}.")
        if self.output_format not in FORMATS:
            raise ConfigError(f"\noutput_format must be one of {', '.join(FORMATS)}, got {self.output_format!r}.")
        if self.log_level not in LOG_LEVELS:
            raise ConfigError(f"\nlog_level must be one of {', '.join(LOG_LEVELS)}, got {self.log_level!r}.")


def _coerce(key, value):
    default = getattr(RunConfig(), key)
    if isinstance(default, bool):
        if isinstance(value, str):
            if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ConfigError(f"\n{key} must be true or false, got {value!r}.")
            return value.lower() in ("true", "1", "yes")
        return bool(value)
    if isinstance(default, int):
        if isinstance(value, bool):
            raise ConfigError(f"\n{key} must be an integer, got {value!r}.")
        try:
            return int(value)
        except (TypeError, ValueError) as error:
            raise ConfigError(f"\n{key} must be an integer, got {value!r}.") from error
    if key == "log_level":
        return str(value).upper()
    return str(value)


def _from_file(path):
    try:
        with open(path, "r") as stream:
            settings = yaml.safe_load(stream) or {}
    except OSError as error:
        raise ConfigError(f"\nCannot read config file {path}: {error.strerror}.") from error
    except yaml.YAMLError as error:
        raise ConfigError(f"\nConfig file {path} is not valid YAML: {error}.") from error
    run = settings.get("run", {}) if isinstance(settings, dict) else None
    if not isinstance(run, dict):
        raise ConfigError(f"\nConfig file {path} must hold a mapping under 'run'.")
    known = set(asdict(RunConfig()))
    unknown = set(run) - known
    if unknown:
        raise ConfigError(f"\nUnknown settings in {path}: {', '.join(sorted(unknown))}.")
    return {key: _coerce(key, value) for key, value in run.items()}


def _from_environment():
    load_dotenv()
    values = {}
    for variable, key in ENVIRONMENT.items():
        value = os.getenv(variable)
        if value is not None and value != "":
            values[key] = _coerce(key, value)
    return values


def load_config(path=None, overrides=None):
    """Resolve the run settings: defaults, then the YAML file, then SYMSUM_* variables, then explicit overrides.

    Args:
        path (str): A YAML file with a ``run:`` mapping, or None.
        overrides (dict): Values from the command line; None entries are ignored.

    Returns:
        RunConfig: The validated settings.

    Examples:
        >>> load_config(overrides={"degree_bound": 8}).degree_bound
        8
    """
    values = {}
    if path is not None:
        values.update(_from_file(path))
    values.update(_from_environment())
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = _coerce(key, value)
    config = replace(RunConfig(), **values)
    logger.debug("Resolved configuration %s", config)
    return config
