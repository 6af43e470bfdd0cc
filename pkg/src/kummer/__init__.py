"""Line congruences along frontals: Kummer forms, principal and developable
surfaces as binary differential equations, and identity checks."""

from .expr import eval_jet, eval_vector, eval_vector_jet, to_text
from .fixtures import FIXTURES, load_fixture
from .jet import EvalError, Jet
from .parser import ArityError, MissingFieldError, ParseError, UnknownIdentifierError, parse_expr, parse_scene, parse_vector
from .scene import CongruenceScene, DomainRect

__all__ = [
    "ArityError",
    "CongruenceScene",
    "DomainRect",
    "EvalError",
    "FIXTURES",
    "Jet",
    "MissingFieldError",
    "ParseError",
    "UnknownIdentifierError",
    "eval_jet",
    "eval_vector",
    "eval_vector_jet",
    "load_fixture",
    "parse_expr",
    "parse_scene",
    "parse_vector",
    "to_text",
]
