import os

import pytest
from hypothesis import settings

settings.register_profile("hlab", max_examples=25, deadline=None)
settings.load_profile("hlab")


@pytest.fixture(autouse=True)
def _extended_precision():
    from hlab import precision
    precision.set_precision(os.environ.get("HLAB_PRECISION", "extended"))
    yield
