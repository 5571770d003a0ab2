"""Simulation engine selection: compiled core with pure-Python fallback.

The hot loop (30k+ RK4 steps of plant plus two observers per run) exists
twice: `_core` is a Cython extension built at install time, `_core_py` is a
line-for-line Python transliteration.  Import picks the extension when the
build produced one; callers can force either via the `engine` argument
("auto", "compiled", "python").  Both kernels use the same operation
ordering, so results agree bitwise -- `benchmarks/bench_engines.py` compares
their speed.
"""

from __future__ import annotations

from . import _core_py

try:
    from . import _core

    HAVE_COMPILED = True
except ImportError:  # extension not built; pure Python takes over
    _core = None
    HAVE_COMPILED = False

DivergedError = _core_py.DivergedError
MODE_FULL = _core_py.MODE_FULL
MODE_SURROGATE = _core_py.MODE_SURROGATE


def resolve(engine="auto"):
    """Map an engine name to its kernel module."""
    if engine == "auto":
        return _core if HAVE_COMPILED else _core_py
    if engine == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled core is not available; rebuild or use engine=python")
        return _core
    if engine == "python":
        return _core_py
    raise ValueError(f"unknown engine {engine!r} (expected auto/compiled/python)")


def engine_name(engine="auto"):
    mod = resolve(engine)
    return "compiled" if mod is _core and _core is not None else "python"


def simulate(engine, *args, **kwargs):
    """Dispatch one simulation run to the selected kernel."""
    mod = resolve(engine)
    try:
        return mod.simulate(*args, **kwargs)
    except _core_py.DivergedError:
        raise
    except RuntimeError as exc:
        # the compiled kernel signals divergence through a plain RuntimeError
        text = str(exc)
        if text.startswith("simulation diverged at step "):
            raise DivergedError(int(text.rsplit(" ", 1)[1])) from None
        raise
