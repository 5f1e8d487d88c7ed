import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import pytest

from relucell import modelio

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

GOLDEN_MODELS = ["golden_2layer", "golden_3layer"]


def golden_model_path(name):
    return os.path.join(DATA_DIR, f"{name}_model.json")


def golden_signvectors(name):
    with open(os.path.join(DATA_DIR, f"{name}_signvectors.txt")) as fh:
        return [line.strip() for line in fh if line.strip()]


@pytest.fixture(scope="session")
def golden_2layer():
    name = "golden_2layer"
    return modelio.load_weights(golden_model_path(name)), golden_signvectors(name)


@pytest.fixture(scope="session")
def golden_3layer():
    name = "golden_3layer"
    return modelio.load_weights(golden_model_path(name)), golden_signvectors(name)
