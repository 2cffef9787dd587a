#!/usr/bin/env python3
"""
dynmsf - Exceptions
===================

Copyright (c) 2026 dynmsf developers.

Exception hierarchy shared by every module. Outcomes that belong to an
operation's contract (no sparse cut, low conductance, pruning failure) are
returned as values; the classes below signal misuse or broken state.
"""

from typing import Optional


class DynMsfError(Exception):
    """Base class for all errors raised deliberately by dynmsf"""


class InputError(DynMsfError, ValueError):
    """An operation was called with arguments violating its preconditions"""


class OracleScaleError(InputError):
    """A brute-force oracle was asked to enumerate beyond its configured cap"""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds oracle cap {cap}")
        self.size = size
        self.cap = cap


class StateError(DynMsfError, RuntimeError):
    """An operation was called in a phase or state that does not allow it"""


class InvariantViolation(StateError):
    """An internal invariant check failed"""


class BudgetExhausted(DynMsfError, RuntimeError):
    """The deletion budget of a bounded structure has been used up"""


class EngineFailure(DynMsfError, RuntimeError):
    """A dynamic engine reported failure and must be restarted"""

    def __init__(self, reason: str, detail: Optional[str] = None):
        message = reason if detail is None else f"{reason}: {detail}"
        super().__init__(message)
        self.reason = reason
        self.detail = detail


class WorkLimitExceeded(DynMsfError, RuntimeError):
    """A work meter passed the limit set for a bounded computation"""

    def __init__(self, units: int, limit: int):
        super().__init__(f"work {units} exceeded limit {limit}")
        self.units = units
        self.limit = limit


class CapacityExceeded(InputError):
    """A structure sized for at most `capacity` items was asked to hold `needed`"""

    def __init__(self, what: str, needed: int, capacity: int):
        super().__init__(f"{what}: {needed} exceeds capacity {capacity}")
        self.needed = needed
        self.capacity = capacity
