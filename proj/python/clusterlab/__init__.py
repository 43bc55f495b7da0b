"""Clique-hypergraph statistics of G(n, p): exact laws, moments, factor counts."""

import json

from . import _core
from ._core import (
    GuardExceeded,
    clique_hypergraph,
    count_factors,
    count_matchings,
    exact_distribution,
    run_cli,
    shamir,
    t_of,
)

__all__ = [
    "GuardExceeded",
    "clique_hypergraph",
    "count_factors",
    "count_matchings",
    "exact_distribution",
    "moment_table",
    "run_cli",
    "shamir",
    "t_of",
]


def moment_table(n, r, p="1/2"):
    """Moment table as a dict; exact values are "a/b" strings."""
    return json.loads(_core.moment_table_json(n, r, str(p)))
