import csv
from pathlib import Path

import pytest

from dressed_cavity.coupling import build_couplings
from dressed_cavity.models.schemas import CavityConfig
from dressed_cavity.settings import get_settings
from dressed_cavity.spectrum import solve_spectrum


@pytest.fixture
def small_config():
    """omega_bar = 1, g = 0.5, delta = 0.1 with a short truncation."""
    return CavityConfig.from_delta(1.0, 0.5, 0.1, truncation=300)


@pytest.fixture
def small_spectrum(small_config):
    return solve_spectrum(small_config)


@pytest.fixture
def small_table(small_config, small_spectrum):
    return build_couplings(small_config, small_spectrum)


@pytest.fixture
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def read_table(path: Path) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Meta block and data rows of a CSV written by the runner."""
    meta = {}
    lines = []
    for line in path.read_text().splitlines():
        if line.startswith("# meta: "):
            key, _, value = line[len("# meta: ") :].partition("=")
            meta[key] = value
        else:
            lines.append(line)
    return meta, list(csv.DictReader(lines))
