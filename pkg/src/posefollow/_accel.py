"""JIT plumbing shared by every kernel module.

All hot math goes through the ``njit`` symbol exported here.  By default it
is numba's ``njit`` with on-disk caching.  Setting ``POSEFOLLOW_DISABLE_JIT=1``
in the environment (or running without numba installed) swaps in a
passthrough decorator so the exact same source executes as plain
numpy/Python.  Useful for debugging, coverage, and the jit-vs-python
benchmark; selected once at import time.
"""

import os


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


_DISABLED = _env_flag("POSEFOLLOW_DISABLE_JIT")

if not _DISABLED:
    try:
        from numba import njit as _numba_njit

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - exercised via env flag instead
        _HAVE_NUMBA = False
else:
    _HAVE_NUMBA = False

JIT_ENABLED = _HAVE_NUMBA and not _DISABLED

if JIT_ENABLED:

    def njit(*args, **kwargs):
        if args and callable(args[0]) and len(args) == 1 and not kwargs:
            return _numba_njit(cache=True)(args[0])
        kwargs.setdefault("cache", True)
        return _numba_njit(*args, **kwargs)

else:

    def njit(*args, **kwargs):
        if args and callable(args[0]) and len(args) == 1 and not kwargs:
            return args[0]

        def passthrough(func):
            return func

        return passthrough
