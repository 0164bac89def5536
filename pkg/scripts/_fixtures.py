"""Fixture loading shared by the experiment scripts."""

from pathlib import Path

from wcc.graph import load_graph
from wcc.markov import maxentropic_chain, uniform_chain

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_chain(name: str):
    """Uniform chain for FB and DB2, maxentropic chain for GM."""
    g = load_graph(FIXTURES / f"{name}.graph")
    return maxentropic_chain(g)[0] if name == "gm" else uniform_chain(g)
