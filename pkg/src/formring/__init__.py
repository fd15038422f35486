"""Exact computations with quadratic groups over finite form rings.

Modules:

* ``ring``, ``poly`` -- finite commutative rings with involution, localization,
  polynomial rings over them.
* ``formparam`` -- form parameters and their closures.
* ``quadgroup`` -- quadratic matrices, membership tests, elementary generators.
* ``elemword`` -- words in generators and the commutator relation table.
* ``polyglue`` -- dilation and local-global gluing of polynomial matrices.
* ``k1lab`` -- enumeration of GQ / EQ and the quotient experiments.
* ``cli`` -- batch jobs driven by INI configs.
"""

from .errors import FormRingError
from .formparam import FormParam, enumerate_form_params, lambda_max, lambda_min
from .quadgroup import QuadMatrix, elem, is_in_gq, stab_embed
from .ring import RingCtx, localize_at, make_ring

__version__ = "0.1.0"

__all__ = [
    "FormParam", "FormRingError", "QuadMatrix", "RingCtx", "elem", "enumerate_form_params",
    "is_in_gq", "lambda_max", "lambda_min", "localize_at", "make_ring", "stab_embed",
]
