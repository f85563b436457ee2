import os

import pytest

from polydec.code_model import load_alist

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
C1_PATH = os.path.join(FIXTURES, "c1_96_48.alist")
C1_NET_PATH = os.path.join(FIXTURES, "cppnet_c1.txt")
FORWARD_FIXTURE_PATH = os.path.join(FIXTURES, "forward_fixture_d6.csv")


@pytest.fixture(scope="session")
def c1_code():
    return load_alist(C1_PATH)


@pytest.fixture(scope="session")
def c1_net_path():
    if not os.path.exists(C1_NET_PATH):
        pytest.fail(f"trained weight fixture missing: {C1_NET_PATH}")
    return C1_NET_PATH
