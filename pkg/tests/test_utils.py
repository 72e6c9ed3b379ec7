import pytest

from uavmec import utils


def test_make_rng_repeats_for_the_same_seed_and_stream():
    first = utils.make_rng(5, "train").random(4)
    second = utils.make_rng(5, "train").random(4)
    assert first.tolist() == second.tolist()


def test_make_rng_streams_differ():
    draws = {stream: utils.make_rng(5, stream).random() for stream in utils.STREAMS}
    assert len(set(draws.values())) == len(utils.STREAMS)


def test_make_rng_streams_are_independent_of_each_other():
    expected = utils.make_rng(5, "eval").random(3)
    train = utils.make_rng(5, "train")
    train.random(1000)
    assert utils.make_rng(5, "eval").random(3).tolist() == expected.tolist()


def test_make_rng_raises_ValueError_for_unknown_stream():
    with pytest.raises(ValueError):
        utils.make_rng(5, "other")


def test_norm():
    assert utils.norm([3.0, 4.0, 0.0]) == 5.0
    assert utils.norm([0, 0, 0]) == 0.0
