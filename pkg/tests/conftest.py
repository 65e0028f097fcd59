import random

from pytest import fixture

from qfe.contiguous import IndexBox
from qfe.golden import AG_K3, AG_K3_BOX, THM41, THM41_BOX, THM41_VARIANT
from qfe.schemas import SeriesParams


@fixture
def ag_k3() -> SeriesParams:
    return AG_K3


@fixture
def ag_k3_box() -> IndexBox:
    return IndexBox.for_params(AG_K3, AG_K3_BOX)


@fixture
def thm41() -> SeriesParams:
    return THM41


@fixture
def thm41_variant() -> SeriesParams:
    return THM41_VARIANT


@fixture
def thm41_box() -> IndexBox:
    return IndexBox.for_params(THM41, THM41_BOX)


@fixture
def rng() -> random.Random:
    return random.Random(20240518)
