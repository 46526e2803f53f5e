"""Exact construction and verification of maximal graded subalgebras of the
modular Lie superalgebras of Cartan type W, S, H and K."""

__version__ = "0.1.0"

from .scalars import make_field, sqrt_in_field  # noqa: F401
from .cartan import build_algebra  # noqa: F401
