"""Numba switch.

Hot kernels are written in the numba-compatible subset of Python and
decorated with :func:`njit` from this module. Setting the environment
variable ``SMCCHAIN_DISABLE_JIT=1`` (or running without numba installed)
leaves them as plain Python functions; results are identical, only slower.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

DISABLE_JIT = os.environ.get("SMCCHAIN_DISABLE_JIT", "0").lower() not in ("", "0", "false", "no")
JIT_ENABLED = numba is not None and not DISABLE_JIT


def njit(fn=None, nrt=True, **kwargs):
    """``numba.njit(cache=True, nogil=True)`` or the identity, per ``JIT_ENABLED``.

    ``nrt=False`` compiles without the reference-counting runtime. Use it
    for functions that never allocate and take the tracker's namedtuple of
    arrays: with NRT on, every call that branches pays one atomic
    incref/decref pair per array.
    """
    options = {"cache": True, "nogil": True}
    if not nrt:
        options["_nrt"] = False
    options.update(kwargs)

    def wrap(f):
        if JIT_ENABLED:
            return numba.njit(**options)(f)
        return f

    if fn is None:
        return wrap
    return wrap(fn)
