"""Plasmon-enhanced atom detection. SI units throughout, angles in radians."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401


def gold_stack(metal=0.180546875 + 4.97625j, thickness=40e-9, glass=1.51, wavelength=780e-9):
    """glass | metal film | vacuum."""
    inf = float("inf")
    return LayerStack([(glass, inf), (metal, thickness), (1.0, inf)], wavelength)  # noqa: F405
