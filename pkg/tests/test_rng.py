import numpy as np

from eekit import rng


def _normals(gen, n, _b):
    return gen.standard_normal(n)


def test_prefix_property():
    long = rng.generate(_normals, 3 * rng.BLOCK_SIZE + 17, seed=9, stream=1)
    short = rng.generate(_normals, rng.BLOCK_SIZE + 5, seed=9, stream=1)
    np.testing.assert_array_equal(long[: short.size], short)


def test_threads_do_not_change_values():
    a = rng.generate(_normals, 50_000, seed=3, stream=2, threads=1)
    b = rng.generate(_normals, 50_000, seed=3, stream=2, threads=4)
    np.testing.assert_array_equal(a, b)


def test_streams_and_seeds_differ():
    a = rng.generate(_normals, 100, seed=1, stream=1)
    assert not np.array_equal(a, rng.generate(_normals, 100, seed=1, stream=2))
    assert not np.array_equal(a, rng.generate(_normals, 100, seed=2, stream=1))


def test_retry_gives_a_different_draw():
    g0 = rng.block_generator(5, 2, 0).standard_normal(4)
    g1 = rng.block_generator(5, 2, 0, retry=1).standard_normal(4)
    assert not np.array_equal(g0, g1)


def test_large_seed_accepted():
    x = rng.generate(_normals, 10, seed=2**64 - 1, stream=1)
    assert x.shape == (10,)
