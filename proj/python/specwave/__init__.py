"""Spectral functional-calculus toolkit for the damped wave flow.

The compiled extension lives next to this file in an installed layout
(scikit-build-core places it inside the package). When working from a plain
CMake build tree, point SPECWAVE_EXT_DIR at the directory holding the
compiled `_core` module.
"""

import os
import sys

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __version__  # noqa: F401
except ImportError:
    _ext_dir = os.environ.get("SPECWAVE_EXT_DIR")
    if not _ext_dir:
        raise
    sys.path.insert(0, _ext_dir)
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
