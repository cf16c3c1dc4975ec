"""Exact Melnikov coefficient computation near planar centers.

Subpackages:

* ``poly`` / ``radicals`` / ``constants`` / ``series`` -- exact kernel
* ``melnikov`` -- expansion coefficients b_0..b_L near a center
* ``normal_form`` -- symmetric quartic family, affine transport
* ``cyclicity`` / ``realroots`` -- coefficient elimination and certificates
* ``num_verify`` -- numeric line-integral oracle
* ``cli`` -- the ``melnikov-kit`` command
"""

from .constants import GammaConst
from .poly import ParamPoly
from .radicals import RadExpr, Ring
from .series import TruncSeries

__all__ = ["GammaConst", "ParamPoly", "RadExpr", "Ring", "TruncSeries"]

__version__ = "0.1.0"
