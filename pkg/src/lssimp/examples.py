"""Small named spaces used in the documentation, the CLI and the tests."""

from .lspace import LabelledSpace, build_space


def ls1() -> LabelledSpace:
    """Two vertices, edges 1-a->1, 1-a->2, 2-b->1, powerset family."""
    return build_space(("1", "2"), [("1", "a", "1"), ("1", "a", "2"), ("2", "b", "1")])


def single_loop() -> LabelledSpace:
    """One vertex with an a-loop: the no-exit cycle space."""
    return build_space(("v",), [("v", "a", "v")])


def two_loop_components() -> LabelledSpace:
    """Two disconnected a-loops: minimality fails."""
    return build_space(("1", "2"), [("1", "a", "1"), ("2", "a", "2")])


def sink_space() -> LabelledSpace:
    """One edge into a sink: finite-type tight filters exist."""
    return build_space(("1", "2"), [("1", "a", "2")])
