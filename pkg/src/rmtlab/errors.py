"""Shared exception types."""


class EstimationError(RuntimeError):
    """An estimator failed to converge or produce a usable value."""


class ResourceLimitError(RuntimeError):
    """A combinatorial or sampling budget was exceeded."""


class CampaignError(ValueError):
    """A campaign file failed to parse or validate; message names the line."""
