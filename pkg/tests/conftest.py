import pytest
import structlog


@pytest.fixture(autouse=True)
def _reset_structlog():
    # cli.main configures structlog against the current sys.stderr, which under
    # pytest is a per-test capture stream that is closed afterwards.
    yield
    structlog.reset_defaults()
