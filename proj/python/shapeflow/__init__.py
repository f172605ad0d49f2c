"""Torsion and eigenvalue functionals of planar domains under deformation and curvature flows."""

from ._shapeflow import *  # noqa: F401,F403
from ._shapeflow import __version__, ShapeflowError  # noqa: F401
