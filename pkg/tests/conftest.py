"""Shared quadrature rules, built once per session (they are immutable)."""

import pytest

from bergman_lab import ball3_rule, disk_rule


@pytest.fixture(scope="session")
def disk():
    return disk_rule(96, 192)


@pytest.fixture(scope="session")
def disk_fine():
    return disk_rule(160, 256)


@pytest.fixture(scope="session")
def ball3():
    return ball3_rule(40, 28, 28)
