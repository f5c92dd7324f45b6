"""Shared fixtures: the worked plants and loss chains used across the suite.

The 2x2 upper-triangular plant with summed-output sensing is the main
workhorse (observability index 2). The rotation plant is the diverging
demo: losses always strike the same phase, so one coordinate is never
seen. The 3x3 Jordan plant has observability index 3 and exercises the
depth-2 gain blocks and idle-step weights.
"""

from pathlib import Path

import numpy as np
import pytest

from peakcov import LossModel, SystemModel

PROBLEMS_DIR = Path(__file__).resolve().parent.parent / "demos" / "problems"


@pytest.fixture(scope="session")
def plant() -> SystemModel:
    return SystemModel(
        A=[[1.3, 0.3], [0.0, 1.2]],
        C=[[1.0, 1.0]],
        Q=np.eye(2),
        R=[[1.0]],
        Sigma0=np.eye(2),
    )


@pytest.fixture(scope="session")
def chain_burst2() -> LossModel:
    # bursts up to 2, idle state sticky enough to matter
    return LossModel(Pi=[[0.6, 0.2, 0.2], [0.8, 0.1, 0.1], [0.8, 0.1, 0.1]])


@pytest.fixture(scope="session")
def chain_iid() -> LossModel:
    # identical rows: gap lengths are i.i.d. under the stationary law
    return LossModel(Pi=[[0.6, 0.2, 0.2]] * 3)


@pytest.fixture(scope="session")
def chain_s1() -> LossModel:
    return LossModel(Pi=[[0.6, 0.4], [0.8, 0.2]])


@pytest.fixture(scope="session")
def chain_s1_sticky() -> LossModel:
    # chain_s1 with the loss state made sticky (0.2 -> 0.5)
    return LossModel(Pi=[[0.6, 0.4], [0.5, 0.5]])


@pytest.fixture(scope="session")
def rotation_plant() -> SystemModel:
    return SystemModel(
        A=[[0.0, -1.3], [1.3, 0.0]],
        C=[[1.0, 0.0]],
        Q=np.eye(2),
        R=[[1.0]],
        Sigma0=np.eye(2),
    )


@pytest.fixture(scope="session")
def rotation_chain() -> LossModel:
    return LossModel(Pi=[[0.1, 0.9], [0.1, 0.9]])


@pytest.fixture(scope="session")
def jordan_plant() -> SystemModel:
    return SystemModel(
        A=[[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]],
        C=[[1.0, 0.0, 0.0]],
        Q=np.eye(3),
        R=[[1.0]],
        Sigma0=np.eye(3),
    )


@pytest.fixture(scope="session")
def problems_dir() -> Path:
    return PROBLEMS_DIR
