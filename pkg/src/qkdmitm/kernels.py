"""Backend selection for the per-position kernels.

The compiled extension is used when it was built; set ``QKDMITM_PURE=1`` to
force the pure-Python twin. Both backends are interchangeable bit for bit.
"""
import os

from . import _pykernels

if os.environ.get("QKDMITM_PURE", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"
    else:
        BACKEND = "cython"

SCRAMBLED = _pykernels.SCRAMBLED
UNIFORM = _pykernels.UNIFORM

encode = _impl.encode
measure_symbolic = _impl.measure_symbolic
prepare_amps = _impl.prepare_amps
measure_physical = _impl.measure_physical
forge = _impl.forge
reconstruct = _impl.reconstruct
classify_copies = _impl.classify_copies
hamming = _impl.hamming


def backends():
    """Every importable backend module, keyed by name."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
