from __future__ import annotations

import pytest

from chaoscope import bouquet


@pytest.fixture(scope="session")
def materialized():
    """Materialized levels 0..3, built once for the whole run."""
    return {n: bouquet.materialize_graph(n) for n in range(4)}
