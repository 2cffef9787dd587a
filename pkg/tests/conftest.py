import pytest
import structlog

import dynmsf.logging_setup as logging_setup

from dynmsf.config import get_settings, load_settings, reset_settings


@pytest.fixture(autouse=True)
def fresh_settings():
    """Every test starts from the packaged defaults"""
    reset_settings()
    yield
    reset_settings()


@pytest.fixture(autouse=True)
def fresh_logging():
    """Drop logger configuration bound to a previous test's captured streams"""
    yield
    structlog.reset_defaults()
    logging_setup._configured = False


@pytest.fixture
def configure():
    """Override settings sections, e.g. configure(engine={"base_threshold": 16})"""

    def apply(**sections):
        settings = load_settings()
        updates = {
            name: getattr(settings, name).model_copy(update=values)
            for name, values in sections.items()
        }
        reset_settings(settings.model_copy(update=updates))
        return get_settings()

    return apply


@pytest.fixture
def recursive_settings(configure):
    """Small thresholds so that modest graphs go through the full engine"""
    return configure(
        engine={"base_threshold": 16, "max_depth": 1, "min_budget": 1},
        assertions={"level": 1},
    )
