"""Backend selection for the hot kernels.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
NumPy fallback in ``_pykernels`` is used.  :func:`use_backend` switches at
runtime (tests and the benchmark use it to compare both).
"""
from __future__ import annotations

from contextlib import contextmanager
from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS: dict[str, ModuleType] = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["compiled"] = _ckernels

_active = "compiled" if _ckernels is not None else "python"


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def active_backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    _active = name


@contextmanager
def use_backend(name: str):
    """Temporarily switch backend."""
    prev = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def bridge_dp(weights, c: int, d: int, n: int, h: int) -> tuple[float, float]:
    return _BACKENDS[_active].bridge_dp(weights, c, d, n, h)


def aberth_polish(coeffs, roots, tol: float, max_iter: int):
    return _BACKENDS[_active].aberth_polish(coeffs, roots, tol, max_iter)
