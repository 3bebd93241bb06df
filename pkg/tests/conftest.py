from fractions import Fraction

import pytest

import betascenery as bs


def frac_ifs(pairs, weights=None):
    maps = [bs.SimilarityMap(Fraction(r), Fraction(t)) for r, t in pairs]
    w = None if weights is None else [Fraction(x) for x in weights]
    return bs.SimilarityIFS(maps, w)


@pytest.fixture(scope="session")
def middle_thirds():
    return frac_ifs([("1/3", 0), ("1/3", "2/3")])


@pytest.fixture(scope="session")
def middle_thirds_model(middle_thirds):
    return bs.build_model(middle_thirds)


@pytest.fixture(scope="session")
def two_ratio():
    # contraction ratios 1/2 and 1/3, attractor [0, 1]
    return frac_ifs([("1/2", 0), ("1/3", "2/3")])


@pytest.fixture(scope="session")
def two_ratio_model(two_ratio):
    return bs.build_model(two_ratio)


@pytest.fixture(scope="session")
def reflected():
    # one orientation-reversing map
    return frac_ifs([("1/3", 0), ("-1/3", 1)])


@pytest.fixture(scope="session")
def reflected_model(reflected):
    return bs.build_model(reflected)


@pytest.fixture(scope="session")
def golden_base():
    return bs.BetaBase(bs.named_constant("golden"))


@pytest.fixture(scope="session")
def tribonacci_base():
    return bs.BetaBase(bs.named_constant("tribonacci"))
