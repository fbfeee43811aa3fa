from pathlib import Path

import pytest

from engine.universal import ParamSpec

ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture
def params():
    return ParamSpec.sample(1, 1)


@pytest.fixture
def params_rank2():
    return ParamSpec.sample(1, 2)


@pytest.fixture
def relations_dir():
    return ROOT / "relations"


@pytest.fixture
def repo_root(monkeypatch):
    """Run from the repository root so relative paths in Settings resolve"""
    monkeypatch.chdir(ROOT)
    return ROOT
