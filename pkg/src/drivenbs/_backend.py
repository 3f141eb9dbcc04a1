"""Select the compiled kernels when available, else the pure-Python ones."""
import os

if os.environ.get("DRIVENBS_PURE_PYTHON"):
    from . import _fallback as kernels
    NAME = "python"
else:
    try:
        from . import _kernels as kernels
        NAME = "cython"
    except ImportError:  # extension not built
        from . import _fallback as kernels
        NAME = "python"

ryser_gray = kernels.ryser_gray
tally_trials = kernels.tally_trials
