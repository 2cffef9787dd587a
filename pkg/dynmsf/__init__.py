#!/usr/bin/env python3
"""
dynmsf - Dynamic Minimum Spanning Forest Toolkit
================================================

Copyright (c) 2026 dynmsf developers.

Maintains a minimum spanning forest of a weighted graph under edge
deletions and insertion batches, together with the local flow, sparse cut,
expander pruning and decomposition machinery it is built from, and a
harness that checks every piece against brute-force oracles.

Author: dynmsf developers
Version: 1.0.0
License: MIT
"""

__version__ = "1.0.0"
__author__ = "dynmsf developers"
__email__ = "dev@dynmsf.org"
__license__ = "MIT"
__copyright__ = "Copyright (c) 2026 dynmsf developers."

from .contraction import FewNonTreeMsf, PhaseRebuildingMsf, contract, restricted_from_decremental
from .decomposition import Hierarchy, msf_decompose, verify_hierarchy
from .dynamic_msf import DynamicMsf, Engine, EngineParams, Failure, preprocess
from .exceptions import (
    BudgetExhausted,
    CapacityExceeded,
    DynMsfError,
    EngineFailure,
    InputError,
    InvariantViolation,
    OracleScaleError,
    StateError,
    WorkLimitExceeded,
)
from .graph_core import Graph, degree_reduce, read_edge_list, write_edge_list
from .msf_support import KruskalReplay, MsfDelta, MultigraphMsf, kruskal

__all__ = [
    "Graph",
    "degree_reduce",
    "read_edge_list",
    "write_edge_list",
    "MsfDelta",
    "MultigraphMsf",
    "KruskalReplay",
    "kruskal",
    "FewNonTreeMsf",
    "PhaseRebuildingMsf",
    "contract",
    "restricted_from_decremental",
    "Hierarchy",
    "msf_decompose",
    "verify_hierarchy",
    "Engine",
    "EngineParams",
    "DynamicMsf",
    "Failure",
    "preprocess",
    "DynMsfError",
    "InputError",
    "OracleScaleError",
    "StateError",
    "InvariantViolation",
    "BudgetExhausted",
    "EngineFailure",
    "WorkLimitExceeded",
    "CapacityExceeded",
    "__version__",
    "__author__",
    "__license__",
]

PACKAGE_INFO = {
    "name": "dynmsf",
    "version": __version__,
    "description": "Dynamic minimum spanning forest with expander-based recursion",
    "author": __author__,
    "email": __email__,
    "license": __license__,
    "copyright": __copyright__,
}


def get_package_info():
    """Get dynmsf package information"""
    return PACKAGE_INFO


def get_version():
    """Get dynmsf version"""
    return __version__
