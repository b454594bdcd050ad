from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def pilot_189_path() -> Path:
    return DATA_DIR / "pilot_189.csv"


@pytest.fixture(scope="session")
def pilot_189(pilot_189_path):
    from metsizer import dataio

    schema = dataio.PilotFileSchema(label_column="group", covariate_columns=["weight"])
    return dataio.load_pilot_csv(pilot_189_path, schema)
