"""Phase-type RAID reliability models.

Thin wrapper around the compiled _raidph module: Weibull/phase-type fits,
symmetry-reduced CTMC transient analysis of RAID/MDS groups, and a Monte
Carlo simulator for cross-checking.
"""

try:
    from ._raidph import *  # noqa: F401,F403
    from ._raidph import __version__  # noqa: F401
except ImportError:  # running against a plain CMake build directory
    from _raidph import *  # noqa: F401,F403
    from _raidph import __version__  # noqa: F401
