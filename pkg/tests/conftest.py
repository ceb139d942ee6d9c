import numpy as np
import pytest

from oric.patterns import Chain, LabeledBatch

# A=a1, B=b1/b2, C=c1/c2 encoded as 1/2
THREE_ROWS = np.array([[1, 1, 1], [1, 2, 1], [1, 1, 2]])


@pytest.fixture
def three_rows():
    return THREE_ROWS.copy()


@pytest.fixture
def three_row_chain():
    return Chain(THREE_ROWS[0], [3, 1, 2], 3)


@pytest.fixture
def three_row_batch():
    return LabeledBatch(("A", "B", "C"), THREE_ROWS, [1, 1, 1])


class ScriptedRng:
    """Stands in for a Generator and returns preset row indices."""

    def __init__(self, indices):
        self.indices = np.asarray(indices)

    def integers(self, low, high, size):
        return self.indices[:size]
