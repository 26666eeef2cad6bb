import numpy as np
import pytest

from oscrenorm import GlElement, Sym2Tensor


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_spd(rng, n, scale=1.0):
    a = rng.normal(size=(n, n))
    return Sym2Tensor(scale * (a @ a.T + 0.5 * np.eye(n)))


def random_sym(rng, n):
    a = rng.normal(size=(n, n))
    return Sym2Tensor(0.5 * (a + a.T))


def random_gl(rng, n):
    while True:
        m = rng.normal(size=(n, n))
        if abs(np.linalg.det(m)) > 0.1:
            return GlElement(m)


def random_gl_pos(rng, n):
    m = random_gl(rng, n)
    if m.det < 0:
        flip = np.eye(n)
        flip[0, 0] = -1.0
        m = GlElement(m.matrix @ flip)
    return m
