import os
import sys

import pytest
from gmpy2 import mpq

from dreg.weyl import DIdeal, WeylElement

sys.path.insert(0, os.path.dirname(__file__))

CORPUS = os.path.join(os.path.dirname(os.path.dirname(__file__)), "corpus")


def xs(n):
    return [WeylElement.x(n, i) for i in range(n)]


def ds(n):
    return [WeylElement.d(n, i) for i in range(n)]


def gkz_regular(beta=(mpq(1, 4), mpq(1, 4))):
    x, d = xs(3), ds(3)
    return DIdeal(3, [d[1] ** 2 - d[0] * d[2],
                      x[0] * d[0] + x[1] * d[1] + x[2] * d[2] - beta[0],
                      x[1] * d[1] + 2 * x[2] * d[2] - beta[1]])


def gkz_irregular(beta=(mpq(1, 2), mpq(1, 3))):
    x, d = xs(3), ds(3)
    return DIdeal(3, [d[1] - d[0] * d[2],
                      x[0] * d[0] + x[1] * d[1] - beta[0],
                      x[1] * d[1] + x[2] * d[2] - beta[1]])


def exp_inverse_x1():
    x, d = xs(2), ds(2)
    return DIdeal(2, [x[0] ** 2 * d[0] + 1, d[1]])


def euler(lam=mpq(2, 3)):
    x, d = xs(1), ds(1)
    return DIdeal(1, [x[0] * d[0] - lam])


@pytest.fixture
def gkz_reg():
    return gkz_regular()


@pytest.fixture
def gkz_irr():
    return gkz_irregular()


@pytest.fixture
def exp_pole():
    return exp_inverse_x1()


def corpus_path(name):
    return os.path.join(CORPUS, name)
