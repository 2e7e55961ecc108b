# hkv/__init__.py
# =============================================================================
# hkv: 超 Kloosterman 和、Dirichlet 特征与 Voronoi 求和公式的数值校验工具。
# / Numerical verification toolkit for hyper-Kloosterman sums, Dirichlet
#   characters and Voronoi summation formulas.
# =============================================================================

"""hkv: 超 Kloosterman 和与 Voronoi 求和公式的数值校验。 / Numerical verification of hyper-Kloosterman and Voronoi identities."""

from hkv.version import VERSION as __version__
from hkv.config import RunConfig
from hkv.engine.runner import run

__all__ = ["RunConfig", "run", "__version__"]
