"""Load-dependent TSP toolkit: exact solvers, oracles and model export."""

try:
    from ldtsp._ldtsp import *  # noqa: F401,F403  (installed extension)
    from ldtsp import _ldtsp as _core
except ImportError:  # in-tree build: extension directory on PYTHONPATH
    from _ldtsp import *  # noqa: F401,F403
    import _ldtsp as _core

__all__ = [name for name in dir(_core) if not name.startswith("_")]
__version__ = "0.1.0"
