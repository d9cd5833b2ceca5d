import json
from pathlib import Path

import pytest

from fso_noma.channel import GammaGammaDist, TurbulenceSpec

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "fso_noma" / "data"

WEAK_TURB = TurbulenceSpec.from_rytov(0.1)
STRONG_TURB = TurbulenceSpec.from_rytov(1.0)


@pytest.fixture(scope="session")
def cdf_reference():
    return json.loads((DATA_DIR / "gg_cdf_reference.json").read_text())


@pytest.fixture(scope="session")
def pdf_reference():
    return json.loads((DATA_DIR / "gg_pdf_reference.json").read_text())


@pytest.fixture(scope="session")
def kv_reference():
    return json.loads((DATA_DIR / "kv_reference.json").read_text())


@pytest.fixture(params=["weak", "strong"], scope="session")
def turbulence(request):
    return WEAK_TURB if request.param == "weak" else STRONG_TURB


@pytest.fixture(scope="session")
def dist(turbulence) -> GammaGammaDist:
    return turbulence.dist
