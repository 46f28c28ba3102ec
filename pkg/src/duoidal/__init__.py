"""Physical duoidal categories: expressions, zetless posets and string diagrams."""
from .errors import *  # noqa: F401,F403
from .expr import N, Atom, Par, Seq, Unit, parse, to_text, seq_e, par_e, list_type, sym_equal
from .poset import TypedPoset, from_relation, is_zetless
from .zetless import encode, decode, inclusion_exists, synthesize_structure_map, enumerate_zetless
from .signature import Signature, SignatureHom
from .diagram import (
    StringDiagram, Node, from_generator, identity, structure_diagram, compose, tensor,
    sequence, derived_poset, validate, is_valid, equal, decompose, recompose, atomic,
)

__version__ = "0.1.0"
