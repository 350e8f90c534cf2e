from __future__ import annotations

from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def pam_ocr_path() -> Path:
    return DATA_DIR / "pam_ocr.txt"


@pytest.fixture
def pam_fixtures_dir() -> Path:
    return DATA_DIR / "pam_fixtures"


@pytest.fixture
def eval_corpus_dir() -> Path:
    return DATA_DIR / "eval_corpus"
