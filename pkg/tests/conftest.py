from pathlib import Path
import random

import pytest

from slocc.config import Settings
from slocc.services.classifier import ClassifierService
from slocc.services.result_store import ResultStore

SAMPLES = Path(__file__).parent.parent / "samples"


@pytest.fixture
def rng():
    return random.Random(20240101)


@pytest.fixture
def settings(tmp_path) -> Settings:
    return Settings(data_dir=tmp_path / "data", samples=32, timeout_ms=60_000)


@pytest.fixture
def service(settings) -> ClassifierService:
    return ClassifierService(settings=settings)


@pytest.fixture
async def store(settings) -> ResultStore:
    result_store = ResultStore(settings.store_path)
    await result_store.initialize()
    return result_store


@pytest.fixture
def samples_dir() -> Path:
    return SAMPLES
