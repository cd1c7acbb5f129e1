"""Hot loops of the samplers.

The compiled extension ``_ckernels`` is used when it was built; otherwise the
pure-Python ``_pykernels`` take over. Set ``TWOLAYER_PURE_PYTHON=1`` to force
the fallback. Both produce identical output for the same generator state.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("TWOLAYER_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        _impl = _ckernels
        BACKEND = "cython"

walk_indirect = _impl.walk_indirect
vsa1_draws = _impl.vsa1_draws
walk_rwtrwa = _impl.walk_rwtrwa
ba_edges = _impl.ba_edges


def get_backend(name):
    """Kernel module by name (``"python"`` or ``"cython"``)."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")
