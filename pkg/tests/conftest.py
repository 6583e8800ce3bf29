import numpy as np
import pytest

from grovent import MarkedSet, PureState, QuditSystem


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def system(*dims) -> QuditSystem:
    return QuditSystem(tuple(dims))


def qubits(n) -> QuditSystem:
    return QuditSystem((2,) * n)


def marked(sys_: QuditSystem, kets) -> MarkedSet:
    return MarkedSet.of(sys_, kets)


def random_state(sys_: QuditSystem, rng) -> PureState:
    amps = rng.standard_normal(sys_.size) + 1j * rng.standard_normal(sys_.size)
    return PureState.normalized(sys_, amps)
