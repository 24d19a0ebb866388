"""Fixed-point nonlinearity-compensation testbed (pybind11 bindings)."""

try:
    from ._fxpnlc import *  # noqa: F401,F403  (installed package layout)
except ImportError:
    from _fxpnlc import *  # noqa: F401,F403  (in-tree build layout)
