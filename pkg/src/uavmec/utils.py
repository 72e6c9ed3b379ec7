"""Utility functions."""

import numpy

# Independent random streams derived from one run seed.
STREAMS = ("layout", "train", "eval", "agent")


def make_rng(seed, stream):
    """Create the random generator for one named stream of a run.

    Streams are derived with numpy's SeedSequence so that, for example, the
    evaluation stream does not depend on how many draws training made.

    Args:
        seed (int): The run seed.
        stream (str): One of STREAMS.

    Returns:
        numpy.random.Generator: A generator private to that stream.

    Raises:
        ValueError: if the stream name is not known.
    """
    if stream not in STREAMS:
        raise ValueError(f"Unknown random stream {stream}; expected one of {STREAMS}.")
    children = numpy.random.SeedSequence(seed).spawn(len(STREAMS))
    return numpy.random.default_rng(children[STREAMS.index(stream)])


def norm(vector):
    """
    Args:
        vector (array-like): A vector.

    Returns:
        float: its Euclidean length.
    """
    return float(numpy.linalg.norm(numpy.asarray(vector, dtype=float)))
