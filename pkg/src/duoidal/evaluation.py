"""Interpret expressions, structure terms and diagrams in a strict physical duoidal algebra.

An algebra supplies objects for basic types, morphisms for generators, the
three ways of combining morphisms and the two primitive coercions
``dist(X, Y, Z, W): (X > Z) * (Y > W) -> (X * Y) > (Z * W)`` and
``sym(X, Y): X * Y -> Y * X``. Every other structure map is built from those.

A diagram is evaluated by cutting it into atomic steps along a firing order:
each step coerces the current cut into a level with a hole, fills the hole
with the generator, and coerces the result into the next cut.
"""
from __future__ import annotations

import operator
from functools import reduce
from typing import Any, Callable, Mapping, Sequence

from . import diagram as D
from .errors import AlgebraTypeMismatch, TypeMismatch, UnassignedGenerator, UnknownType
from .expr import Atom, Expression, N, Par, Seq, Unit, list_type, map_types, par_e, seq_e, to_text
from .poset import HOLE
from .signature import Signature
from .zetless import Compose, Dist, Id, ParOf, SeqOf, StructureTerm, Sym, structure_term, tag

__all__ = [
    "Algebra", "WeightAlgebra", "SelfAlgebra",
    "eval_object", "eval_structure", "eval_diagram",
]


class Algebra:
    """The operations an interpretation must provide.

    Subclasses override what they need. ``dom``/``cod`` are optional; when an
    algebra defines them, generator morphisms are checked against the
    evaluated generator types.
    """

    def obj(self, name) -> Any:
        raise NotImplementedError

    def unit(self) -> Any:
        raise NotImplementedError

    def seq_obj(self, a, b) -> Any:
        raise NotImplementedError

    def par_obj(self, a, b) -> Any:
        raise NotImplementedError

    def gen(self, name: str) -> Any:
        raise NotImplementedError

    def identity(self, a) -> Any:
        raise NotImplementedError

    def compose(self, f, g) -> Any:
        """``f`` then ``g``."""
        raise NotImplementedError

    def tensor(self, f, g) -> Any:
        raise NotImplementedError

    def seq(self, f, g) -> Any:
        raise NotImplementedError

    def dist(self, x, y, z, w) -> Any:
        raise NotImplementedError

    def sym(self, x, y) -> Any:
        raise NotImplementedError

    dom: Callable = None
    cod: Callable = None


class WeightAlgebra(Algebra):
    """One object; morphisms are elements of a commutative monoid.

    Every composite is the product of the weights of its generators, so two
    diagrams with the same multiset of nodes always get the same value.
    """

    def __init__(self, weights: Mapping[str, Any], op: Callable = operator.mul, neutral: Any = 1):
        self.weights = dict(weights)
        self.op = op
        self.neutral = neutral

    def obj(self, name):
        return "*"

    def unit(self):
        return "*"

    def seq_obj(self, a, b):
        return "*"

    par_obj = seq_obj

    def gen(self, name):
        try:
            return self.weights[name]
        except KeyError:
            raise UnassignedGenerator(f"no weight for generator {name!r}") from None

    def identity(self, a):
        return self.neutral

    def compose(self, f, g):
        return self.op(f, g)

    tensor = seq = compose

    def dist(self, x, y, z, w):
        return self.neutral

    def sym(self, x, y):
        return self.neutral


class SelfAlgebra(Algebra):
    """Diagrams interpreting themselves: objects are expressions, morphisms diagrams."""

    def __init__(self, signature: Signature):
        self.signature = signature

    def obj(self, name):
        if self.signature.types and name not in self.signature.types:
            raise UnknownType(name)
        return Atom(name)

    def unit(self):
        return N

    def seq_obj(self, a, b):
        return seq_e(a, b)

    def par_obj(self, a, b):
        return par_e(a, b)

    def gen(self, name):
        if name not in self.signature:
            raise UnassignedGenerator(f"generator {name!r} is not in the signature")
        return D.from_generator(self.signature, name)

    def identity(self, a):
        return D.identity(a, self.signature)

    def compose(self, f, g):
        return D.compose(f, g)

    def tensor(self, f, g):
        return D.tensor(f, g)

    def seq(self, f, g):
        return D.sequence(f, g)

    def dist(self, x, y, z, w):
        a, b, c, e = (len(list_type(t)) for t in (x, y, z, w))
        # source leaves: x z y w; target leaves: x y z w
        mapping = ([i for i in range(a)] + [a + b + i for i in range(c)]
                   + [a + i for i in range(b)] + [a + b + c + i for i in range(e)])
        return D.wiring(par_e(seq_e(x, z), seq_e(y, w)), seq_e(par_e(x, y), par_e(z, w)),
                        mapping, self.signature)

    def sym(self, x, y):
        a, b = len(list_type(x)), len(list_type(y))
        mapping = [b + i for i in range(a)] + [i for i in range(b)]
        return D.wiring(par_e(x, y), par_e(y, x), mapping, self.signature)

    def dom(self, m):
        return m.source

    def cod(self, m):
        return m.target


def eval_object(alg: Algebra, e: Expression):
    if isinstance(e, Unit):
        return alg.unit()
    if isinstance(e, Atom):
        return alg.obj(e.name)
    parts = [eval_object(alg, c) for c in e.children]
    return reduce(alg.seq_obj if isinstance(e, Seq) else alg.par_obj, parts)


def eval_structure(alg: Algebra, t: StructureTerm):
    if isinstance(t, Id):
        return alg.identity(eval_object(alg, t.expr))
    if isinstance(t, Dist):
        return alg.dist(*(eval_object(alg, e) for e in (t.x, t.y, t.z, t.w)))
    if isinstance(t, Sym):
        return alg.sym(eval_object(alg, t.x), eval_object(alg, t.y))
    if isinstance(t, (SeqOf, ParOf, Compose)):
        op = {SeqOf: alg.seq, ParOf: alg.tensor, Compose: alg.compose}[type(t)]
        return reduce(op, [eval_structure(alg, s) for s in t.terms])
    raise TypeMismatch(f"not a structure term: {t!r}")


def _generator(alg: Algebra, d: D.StringDiagram, name: str):
    m = alg.gen(name)
    if alg.dom is not None and d.signature is not None:
        src, tgt = d.signature[name]
        if alg.dom(m) != eval_object(alg, src) or alg.cod(m) != eval_object(alg, tgt):
            raise AlgebraTypeMismatch(
                f"generator {name!r} is interpreted with the wrong type, expected "
                f"{to_text(src)} -> {to_text(tgt)}"
            )
    return m


def _whisker(alg: Algebra, d: D.StringDiagram, tree: Expression, filler):
    """Identity on every wire atom of ``tree``, ``filler`` in place of the hole."""
    if isinstance(tree, Atom):
        return filler if tree.name is HOLE else alg.identity(alg.obj(d.wires[tree.name]))
    parts = [_whisker(alg, d, c, filler) for c in tree.children]
    return reduce(alg.seq if isinstance(tree, Seq) else alg.tensor, parts)


def eval_diagram(alg: Algebra, d: D.StringDiagram, order: Sequence[int] = None):
    """The morphism of ``d`` in ``alg``, computed along ``order`` (default: ``node_order``)."""
    for node in d.nodes:
        if d.signature is None or node.label not in d.signature:
            raise UnassignedGenerator(f"generator {node.label!r} is not in the signature")
    first, steps, last = D.cuts(d, order)
    labels = d.wires
    src_tree = map_types(lambda k: d.inputs[k], tag(d.source))
    tgt_tree = map_types(lambda k: d.outputs[k], tag(d.target))

    def coerce(a, b):
        return eval_structure(alg, structure_term(labels, a, b))

    parts = [coerce(src_tree, first.tree)]
    for st in steps:
        g = _generator(alg, d, d.nodes[st.node].label)
        parts.append(coerce(st.before.tree, st.expanded_in))
        parts.append(_whisker(alg, d, st.outer, g))
        parts.append(coerce(st.expanded_out, st.after.tree))
    parts.append(coerce(last.tree, tgt_tree))
    return reduce(alg.compose, parts)
