from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest

from nema.ingest import Catalog, load_manifest

_RESULTS = pytest.StashKey[dict]()


def toy_dir() -> Path:
    return Path(str(resources.files("nema") / "data" / "toy"))


@pytest.fixture(scope="session")
def toy_manifest() -> Path:
    return toy_dir() / "manifest.json"


@pytest.fixture
def toy_catalog(toy_manifest) -> Catalog:
    return Catalog(load_manifest(toy_manifest))


@pytest.fixture
def toy_full_catalog() -> Catalog:
    return Catalog(load_manifest(toy_dir() / "manifest_full.json"))


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for an acceptance criterion, then assert it."""
    results = request.config.stash[_RESULTS]

    def record(number: int, ok: bool, detail: str) -> None:
        results[number] = (bool(ok), detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, f"criterion {number}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, detail = results[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
