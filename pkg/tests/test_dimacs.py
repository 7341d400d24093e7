import io

import pytest

from cliquelab.dimacs import format_dimacs, parse_dimacs, read_dimacs, write_dimacs
from cliquelab.errors import GraphError
from cliquelab.graph import Graph

from conftest import corpus


def test_round_trip_is_bit_exact(tmp_path):
    for k, g in enumerate(corpus(50, (1, 25), seed=2)):
        path = tmp_path / f"g{k}.dimacs"
        write_dimacs(g, path)
        text = path.read_bytes()
        g2 = read_dimacs(path)
        assert g2 == g
        write_dimacs(g2, path)
        assert path.read_bytes() == text


def test_one_based_labels_and_sorted_edges():
    g = Graph(3, [(2, 1), (0, 2)])
    assert format_dimacs(g) == "p edge 3 2\ne 1 3\ne 2 3\n"


def test_duplicates_merged_and_counted(caplog):
    g, dups = parse_dimacs(["c hello", "p edge 3 3", "e 1 2", "e 2 1", "e 2 3"])
    assert dups == 1
    assert g.sorted_edges() == [(0, 1), (1, 2)]
    assert "duplicate" in caplog.text


@pytest.mark.parametrize(
    "lines",
    [
        ["e 1 2"],
        ["p edge 2 1", "e 1 1"],
        ["p edge 2 1", "e 1 3"],
        ["p edge 2 1", "x 1 2"],
        [],
    ],
)
def test_malformed_input(lines):
    with pytest.raises(GraphError):
        parse_dimacs(lines)


def test_write_to_stream():
    buf = io.StringIO()
    write_dimacs(Graph.path(2), buf, comments=["planted"])
    assert buf.getvalue() == "c planted\np edge 2 1\ne 1 2\n"
