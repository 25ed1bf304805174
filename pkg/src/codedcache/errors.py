class IntegrityError(RuntimeError):
    """Cache or broadcast content is missing or inconsistent with the scheme."""


class ConfigError(ValueError):
    """Invalid run parameters."""
