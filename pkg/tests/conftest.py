import pytest

from hgcsp.hypergraph import Hypergraph


def fano_plane():
    """Seven points, lines {i, i+1, i+3} mod 7."""
    lines = []
    for i in range(7):
        lines.append([f"p{i}", f"p{(i + 1) % 7}", f"p{(i + 3) % 7}"])
    return Hypergraph(lines)


def k4_hypergraph():
    """The six binary edges of a 4-clique."""
    names = ["A", "B", "C", "D"]
    return Hypergraph([[u, v] for i, u in enumerate(names)
                       for v in names[i + 1:]])


def q1_hypergraph():
    """The path-like 9-variable join query from the width fixtures."""
    return Hypergraph([list("ABC"), list("CD"), list("DEF"),
                       list("EFGH"), list("HI")])


def path_hypergraph(*names):
    names = names or ("a", "b", "c", "d")
    return Hypergraph([[u, v] for u, v in zip(names, names[1:])])


@pytest.fixture
def fano():
    return fano_plane()


@pytest.fixture
def k4():
    return k4_hypergraph()


@pytest.fixture
def q1():
    return q1_hypergraph()
