"""Contiguity-constrained clustering of regions from per-region count data."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import RegionkitError, run_cluster as _run_cluster

__version__ = "0.1.0"


def cluster(**config):
    """Run the full pipeline. Keyword arguments mirror the report's config_echo keys."""
    return _json.loads(_run_cluster(_json.dumps(config)))
