"""Process-wide computation limits, scoped with a context manager."""

import contextlib
import contextvars
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Limits:
    degree_bound: int = 64
    probe_degree: int = 8
    seed: int = 0


_current = contextvars.ContextVar("ferrand_limits", default=Limits())


def limits():
    return _current.get()


@contextlib.contextmanager
def using(**overrides):
    """Temporarily override limits, e.g. ``with using(degree_bound=16): ...``."""
    token = _current.set(replace(_current.get(), **overrides))
    try:
        yield _current.get()
    finally:
        _current.reset(token)
