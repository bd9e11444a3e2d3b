"""Elastic properties of isotropic discrete rigid-body systems.

Tessellation generation, contact geometry, closed-form Poisson's ratio and
elastic modulus predictors, and a 2D rigid-body-spring solver with
macroscopic property extraction.
"""

__version__ = "0.1.0"
