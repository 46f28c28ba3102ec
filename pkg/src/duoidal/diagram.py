"""Physical string diagrams: wire-linear acyclic hypergraphs with a wire poset.

A ``StringDiagram`` stores its wires as a tuple of type labels (wire ``w`` has
label ``wires[w]``), its generator nodes, and the two boundaries: ``inputs``
lists the wires leaving the input boundary and ``outputs`` the wires entering
the output boundary, both in the leaf order of ``source`` and ``target``.

The wire poset is never stored. ``derived_poset`` recomputes the least order
compatible with the diagram: the source order on input wires, each node's
target order on its outputs, every input of a node below each of its outputs,
and outputs inheriting the order of the inputs against the wires that are
alive next to the node.
"""
from __future__ import annotations

import heapq
import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, NamedTuple, Optional, Sequence

from . import poset as P
from .errors import (
    BoundaryMismatch, Cyclic, DecompositionError, InvalidInclusion, NoInputInclusion,
    NoSuchStructureMap, NotInterval, NotWireLinear, SignatureMismatch, TypeMismatch,
    UnknownGenerator,
)
from .expr import (
    Atom, Expression, N, Par, Seq, Unit, list_type, par_all, par_e, parse, seq_all,
    seq_e, sym_equal, to_text,
)
from .poset import HOLE, TypedPoset
from .signature import Signature, SignatureHom
from .zetless import Inclusion, decode, decode_tagged, encode, inclusion_exists, tag

__all__ = [
    "Node", "StringDiagram", "from_generator", "identity", "structure_diagram",
    "wiring", "derived_poset", "validate", "is_valid", "compose", "tensor", "sequence",
    "compose_all", "equal", "canonical_form", "canonical_diagram", "node_order", "all_node_orders",
    "valid_node_orders", "is_firing_order",
    "atomic", "decompose", "decomposition", "recompose", "Decomposition", "relabel",
    "to_json", "from_json", "to_dot", "to_ascii", "cuts", "Cut",
]

INPUT = "in"
OUTPUT = "out"


@dataclass(frozen=True)
class Node:
    label: str
    inputs: tuple
    outputs: tuple

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))


@dataclass(frozen=True)
class StringDiagram:
    signature: Optional[Signature]
    wires: tuple
    nodes: tuple
    inputs: tuple
    outputs: tuple
    source: Expression
    target: Expression

    def __post_init__(self):
        for name in ("wires", "nodes", "inputs", "outputs"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def __repr__(self):
        body = ", ".join(f"{n.label}{list(n.inputs)}->{list(n.outputs)}" for n in self.nodes)
        return f"<StringDiagram {self.source} -> {self.target}: {body or 'no nodes'}>"

    @cached_property
    def producer(self) -> dict:
        """wire -> (node index or INPUT, port)."""
        out = {}
        for k, w in enumerate(self.inputs):
            out.setdefault(w, (INPUT, k))
        for n, node in enumerate(self.nodes):
            for k, w in enumerate(node.outputs):
                out.setdefault(w, (n, k))
        return out

    @cached_property
    def consumer(self) -> dict:
        """wire -> (node index or OUTPUT, port)."""
        out = {}
        for n, node in enumerate(self.nodes):
            for k, w in enumerate(node.inputs):
                out.setdefault(w, (n, k))
        for k, w in enumerate(self.outputs):
            out.setdefault(w, (OUTPUT, k))
        return out

    @cached_property
    def successors(self) -> list:
        succ = [set() for _ in self.nodes]
        for n, node in enumerate(self.nodes):
            for w in node.outputs:
                c = self.consumer.get(w, (OUTPUT, 0))[0]
                if c != OUTPUT:
                    succ[n].add(c)
        return succ

    @cached_property
    def descendants(self) -> list:
        out = []
        for n in range(len(self.nodes)):
            seen = set()
            stack = list(self.successors[n])
            while stack:
                m = stack.pop()
                if m not in seen:
                    seen.add(m)
                    stack.extend(self.successors[m])
            out.append(frozenset(seen))
        return out

    @cached_property
    def ancestors(self) -> list:
        anc = [set() for _ in self.nodes]
        for n, ds in enumerate(self.descendants):
            for m in ds:
                anc[m].add(n)
        return [frozenset(a) for a in anc]


def _merge_signatures(a, b):
    """Union of two signatures that agree on every shared generator."""
    if a is None:
        return b
    if b is None or a == b:
        return a
    gens = dict(a.generators)
    for g, typ in b.generators.items():
        if gens.setdefault(g, typ) != typ:
            raise SignatureMismatch(f"generator {g!r} is typed differently in the two diagrams")
    return Signature(a.types | b.types, gens)


# -- constructors -------------------------------------------------------------

def from_generator(sig: Signature, g: str) -> StringDiagram:
    src, tgt = sig[g]
    ls, lt = list_type(src), list_type(tgt)
    ins = tuple(range(len(ls)))
    outs = tuple(range(len(ls), len(ls) + len(lt)))
    return StringDiagram(sig, tuple(ls + lt), (Node(g, ins, outs),), ins, outs, src, tgt)


def identity(e: Expression, signature: Signature = None) -> StringDiagram:
    ws = tuple(list_type(e))
    ids = tuple(range(len(ws)))
    return StringDiagram(signature, ws, (), ids, ids, e, e)


def wiring(source: Expression, target: Expression, mapping: Sequence[int], signature=None) -> StringDiagram:
    """Node-free diagram sending the ``k``-th source leaf to leaf ``mapping[k]`` of the target."""
    inc = Inclusion(encode(source), encode(target), tuple(mapping))
    outs = [None] * len(inc.mapping)
    for k, j in enumerate(inc.mapping):
        outs[j] = k
    ws = tuple(list_type(source))
    return StringDiagram(signature, ws, (), tuple(range(len(ws))), tuple(outs), source, target)


def structure_diagram(source, target: Expression = None, signature: Signature = None,
                      mapping: Sequence[int] = None) -> StringDiagram:
    """The node-free diagram of a structure map.

    Either pass an ``Inclusion`` (giving ``decode(source) -> decode(target)``)
    or two expressions, optionally with an explicit leaf mapping.
    """
    if isinstance(source, Inclusion):
        inc = source
        s_tag, t_tag = decode_tagged(inc.source), decode_tagged(inc.target)
        s_order, t_order = list_type(s_tag), list_type(t_tag)
        t_pos = {el: j for j, el in enumerate(t_order)}
        mapping = [t_pos[inc.mapping[el]] for el in s_order]
        return wiring(decode(inc.source), decode(inc.target), mapping, signature)
    if mapping is None:
        inc = inclusion_exists(encode(source), encode(target))
        if inc is None:
            raise NoSuchStructureMap(f"no structure map {to_text(source)} -> {to_text(target)}")
        mapping = inc.mapping
    return wiring(source, target, mapping, signature)


# -- the wire poset ----------------------------------------------------------

def _close(up):
    n = len(up)
    for k in range(n):
        bk, uk = 1 << k, up[k]
        for i in range(n):
            if up[i] & bk:
                up[i] |= uk
    return up


def _mask(ws):
    m = 0
    for w in ws:
        m |= 1 << w
    return m


def _bits(m):
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


LE, GE, PAR = "le", "ge", "par"


def _order_masks(nwires, boundary, boundary_leq, nodes):
    """Closed wire order propagated from ``boundary`` through ``nodes``.

    ``nodes`` lists ``(inputs, outputs, output_leq)`` with ``output_leq`` given
    on port positions. Two wires are compared only if some schedule keeps both
    alive at once; the comparison unfolds the producer of one of them: a new
    wire sits above (below) an older one iff one of its producer's inputs
    does. Unfolding fails if the older wire would sit strictly inside the
    producer's input block, since then the producer could not fire while it
    is alive. Everything else follows by transitivity from inputs lying
    below outputs.
    """
    prod, cons = {}, {}
    for k, w in enumerate(boundary):
        prod[w] = (None, k)
    for n, (ins, outs, _) in enumerate(nodes):
        for k, w in enumerate(outs):
            prod[w] = (n, k)
        for w in ins:
            cons[w] = n
    succ = [{cons[w] for w in outs if w in cons} for _, outs, _ in nodes]
    reach = []  # reach[n]: n and every node downstream of it
    for n in range(len(nodes)):
        seen, stack = {n}, list(succ[n])
        while stack:
            m = stack.pop()
            if m not in seen:
                seen.add(m)
                stack.extend(succ[m])
        reach.append(seen)

    def before(n, m):
        return n is not None and m is not None and m in reach[n]

    memo = {}

    def against(rs):
        """Relation to a producer's input block, read off the relations to its members."""
        if None in rs:
            return None
        below, above = LE in rs, GE in rs
        if below and above:
            return None
        return LE if below else GE if above else PAR

    def rel(x, y):
        if x == y:
            return "eq"
        key = (x, y)
        if key in memo:
            return memo[key]
        (px, kx), (py, ky) = prod[x], prod[y]
        out = None
        if before(cons.get(x), py) or before(cons.get(y), px):
            out = None
        elif px == py:
            pairs = boundary_leq if px is None else nodes[px][2]
            out = LE if (kx, ky) in pairs else GE if (ky, kx) in pairs else PAR
        else:
            if py is not None and not before(py, px):
                out = against([rel(x, i) for i in nodes[py][0]])
            if out is None and px is not None and not before(px, py):
                out = against([rel(i, y) for i in nodes[px][0]])
        memo[key] = out
        return out

    up = [1 << w for w in range(nwires)]
    for ins, outs, _ in nodes:
        om = _mask(outs)
        for i in ins:
            up[i] |= om
    for x in range(nwires):
        for y in range(nwires):
            if x != y and rel(x, y) == LE:
                up[x] |= 1 << y
    return _close(up)


def _forward_masks(d: StringDiagram) -> list:
    nodes = []
    for nd in d.nodes:
        tgt = d.signature[nd.label][1] if d.signature and nd.label in d.signature else None
        nodes.append((nd.inputs, nd.outputs, encode(tgt).leq if tgt is not None else ()))
    return _order_masks(len(d.wires), d.inputs, encode(d.source).leq, nodes)


def _backward_masks(d: StringDiagram) -> list:
    """The same propagation run from the output boundary against the arrows."""
    nodes = []
    for nd in d.nodes:
        src = d.signature[nd.label][0]
        nodes.append((nd.outputs, nd.inputs, {(b, a) for a, b in encode(src).leq}))
    down = _order_masks(len(d.wires), d.outputs, {(b, a) for a, b in encode(d.target).leq}, nodes)
    up = [0] * len(down)
    for x in range(len(down)):
        for y in _bits(down[x]):
            up[y] |= 1 << x
    return up


def _masks_to_poset(labels, up) -> TypedPoset:
    leq = frozenset((x, y) for x in range(len(up)) for y in _bits(up[x]))
    return TypedPoset(tuple(labels), leq)


def derived_poset(d: StringDiagram) -> TypedPoset:
    """The least wire order compatible with ``d``; element ``w`` is wire ``w``.

    On an invalid diagram the relation may fail antisymmetry.
    """
    return _masks_to_poset(d.wires, _forward_masks(d))


# -- validation -----------------------------------------------------------------

def _check_structure(d: StringDiagram):
    nw = len(d.wires)
    produced = [0] * nw
    consumed = [0] * nw
    for w in d.inputs:
        if not (isinstance(w, int) and 0 <= w < nw):
            raise NotWireLinear(f"wire {w!r} does not exist", wire=w)
        produced[w] += 1
    for w in d.outputs:
        if not (isinstance(w, int) and 0 <= w < nw):
            raise NotWireLinear(f"wire {w!r} does not exist", wire=w)
        consumed[w] += 1
    for node in d.nodes:
        for w in node.outputs + node.inputs:
            if not (isinstance(w, int) and 0 <= w < nw):
                raise NotWireLinear(f"wire {w!r} does not exist", wire=w)
        for w in node.outputs:
            produced[w] += 1
        for w in node.inputs:
            consumed[w] += 1
    for w in range(nw):
        if produced[w] != 1 or consumed[w] != 1:
            raise NotWireLinear(
                f"wire {w} is produced {produced[w]} times and consumed {consumed[w]} times", wire=w
            )
    # Kahn: a leftover node lies on a cycle
    indeg = [0] * len(d.nodes)
    for n in range(len(d.nodes)):
        for m in d.successors[n]:
            indeg[m] += 1
    queue = [n for n, k in enumerate(indeg) if k == 0]
    seen = 0
    while queue:
        n = queue.pop()
        seen += 1
        for m in d.successors[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                queue.append(m)
    if seen != len(d.nodes):
        raise Cyclic("the hypergraph contains a closed path")


def _check_typing(d: StringDiagram):
    if [d.wires[w] for w in d.inputs] != list_type(d.source):
        raise BoundaryMismatch(f"input boundary wires do not match {to_text(d.source)}")
    if [d.wires[w] for w in d.outputs] != list_type(d.target):
        raise BoundaryMismatch(f"output boundary wires do not match {to_text(d.target)}")
    for n, node in enumerate(d.nodes):
        if d.signature is None or node.label not in d.signature:
            raise UnknownGenerator(f"node {n} is labelled by unknown generator {node.label!r}")
        src, tgt = d.signature[node.label]
        if [d.wires[w] for w in node.inputs] != list_type(src):
            raise TypeMismatch(f"inputs of node {n} ({node.label}) do not match {to_text(src)}",
                               generator=node.label, node=n)
        if [d.wires[w] for w in node.outputs] != list_type(tgt):
            raise TypeMismatch(f"outputs of node {n} ({node.label}) do not match {to_text(tgt)}",
                               generator=node.label, node=n)


def _included(up, ws, expr) -> bool:
    enc = encode(expr)
    for a, wa in enumerate(ws):
        for b, wb in enumerate(ws):
            if a != b and up[wa] >> wb & 1 and (a, b) not in enc.leq:
                return False
    return True


def validate(d: StringDiagram) -> None:
    """Raise the error of the first violated condition; return None if valid."""
    _check_structure(d)
    _check_typing(d)
    _schedule(d)
    up = _forward_masks(d)
    for n, node in enumerate(d.nodes):
        if not _included(up, node.inputs, d.signature[node.label][0]):
            raise NoInputInclusion(
                f"order on inputs {list(node.inputs)} of node {n} ({node.label}) does not include "
                f"into {to_text(d.signature[node.label][0])}",
                node=n,
            )
    for x in range(len(up)):
        for y in _bits(up[x]):
            if x != y and up[y] >> x & 1:
                raise NotInterval(f"the derived order identifies wires {x} and {y}", wires=[x, y])
    if not _included(up, d.outputs, d.target):
        raise BoundaryMismatch(f"derived order on output wires does not include into {to_text(d.target)}")


def is_valid(d: StringDiagram) -> bool:
    try:
        validate(d)
    except Exception:
        return False
    return True


# -- operations ---------------------------------------------------------------------

def _shifted(d: StringDiagram, k: int):
    nodes = tuple(Node(n.label, tuple(w + k for w in n.inputs), tuple(w + k for w in n.outputs))
                  for n in d.nodes)
    return nodes, tuple(w + k for w in d.inputs), tuple(w + k for w in d.outputs)


def compose(a: StringDiagram, b: StringDiagram) -> StringDiagram:
    """``a`` then ``b``: output wires of ``a`` are glued to input wires of ``b`` by position.

    If the boundaries agree only up to symmetry, the wires are routed through
    the structure diagram of the least permutation witness.
    """
    if a.target != b.source:
        if not sym_equal(a.target, b.source):
            raise BoundaryMismatch(f"cannot compose: {to_text(a.target)} vs {to_text(b.source)}")
        a = compose(a, structure_diagram(a.target, b.source, a.signature))
    sig = _merge_signatures(a.signature, b.signature)
    glue = {bw: aw for bw, aw in zip(b.inputs, a.outputs)}
    rename = {}
    wires = list(a.wires)
    for w in range(len(b.wires)):
        if w in glue:
            rename[w] = glue[w]
        else:
            rename[w] = len(wires)
            wires.append(b.wires[w])
    nodes = a.nodes + tuple(
        Node(n.label, tuple(rename[w] for w in n.inputs), tuple(rename[w] for w in n.outputs))
        for n in b.nodes
    )
    return StringDiagram(sig, tuple(wires), nodes, a.inputs,
                         tuple(rename[w] for w in b.outputs), a.source, b.target)


def compose_all(ds) -> StringDiagram:
    ds = list(ds)
    out = ds[0]
    for d in ds[1:]:
        out = compose(out, d)
    return out


def _juxtapose(a, b, join):
    sig = _merge_signatures(a.signature, b.signature)
    nodes, ins, outs = _shifted(b, len(a.wires))
    return StringDiagram(sig, a.wires + b.wires, a.nodes + nodes, a.inputs + ins,
                         a.outputs + outs, join(a.source, b.source), join(a.target, b.target))


def tensor(a: StringDiagram, b: StringDiagram) -> StringDiagram:
    return _juxtapose(a, b, par_e)


def sequence(a: StringDiagram, b: StringDiagram) -> StringDiagram:
    """Juxtapose with every wire of ``a`` ordered before every wire of ``b``.

    The order lives in the boundary expressions; the derived poset keeps only
    what those force.
    """
    return _juxtapose(a, b, seq_e)


def relabel(h: SignatureHom, d: StringDiagram) -> StringDiagram:
    nodes = tuple(Node(h.gen_map[n.label], n.inputs, n.outputs) for n in d.nodes)
    return StringDiagram(h.target, tuple(h.type_map[t] for t in d.wires), nodes, d.inputs,
                         d.outputs, h.map_expr(d.source), h.map_expr(d.target))


# -- equality ---------------------------------------------------------------------

def _traverse(d, start_wires=(), start_node=None):
    """Number nodes and wires in breadth-first order from the given start."""
    wnum, nnum = {}, {}
    queue = deque()

    def see_wire(w):
        if w not in wnum:
            wnum[w] = len(wnum)
            queue.append(w)

    def see_node(n):
        if n not in nnum:
            nnum[n] = len(nnum)
            for w in d.nodes[n].inputs + d.nodes[n].outputs:
                see_wire(w)

    for w in start_wires:
        see_wire(w)
    if start_node is not None:
        see_node(start_node)
    while queue:
        w = queue.popleft()
        for end in (d.producer[w][0], d.consumer[w][0]):
            if end not in (INPUT, OUTPUT):
                see_node(end)
    return wnum, nnum


def _encode_part(d, wnum, nnum):
    nodes = sorted(nnum, key=nnum.get)
    wires = sorted(wnum, key=wnum.get)
    return (
        tuple(d.wires[w] for w in wires),
        tuple((d.nodes[n].label, tuple(wnum[w] for w in d.nodes[n].inputs),
               tuple(wnum[w] for w in d.nodes[n].outputs)) for n in nodes),
    )


def canonical_form(d: StringDiagram) -> tuple:
    """Equal for two diagrams iff they are isomorphic as boundary-pinned hypergraphs."""
    wnum, nnum = _traverse(d, start_wires=d.inputs + d.outputs)
    main = _encode_part(d, wnum, nnum) + (
        tuple(wnum[w] for w in d.inputs), tuple(wnum[w] for w in d.outputs))
    rest = [n for n in range(len(d.nodes)) if n not in nnum]
    closed = []
    while rest:
        _, comp_n = _traverse(d, start_node=rest[0])
        best = None
        for s in comp_n:
            wn, nn = _traverse(d, start_node=s)
            enc = _encode_part(d, wn, nn)
            if best is None or repr(enc) < repr(best):
                best = enc
        closed.append(best)
        rest = [n for n in rest if n not in comp_n]
    closed.sort(key=repr)
    return (to_text(d.source), to_text(d.target), main, tuple(closed))


def canonical_diagram(d: StringDiagram) -> StringDiagram:
    """``d`` with wires and nodes renumbered in canonical traversal order.

    Two diagrams are ``equal`` iff their canonical diagrams are identical.
    """
    wnum, nnum = _traverse(d, start_wires=d.inputs + d.outputs)
    rest = [n for n in range(len(d.nodes)) if n not in nnum]
    comps = []
    while rest:
        _, comp = _traverse(d, start_node=rest[0])
        best = None
        for s in comp:
            wn, nn = _traverse(d, start_node=s)
            enc = repr(_encode_part(d, wn, nn))
            if best is None or enc < best[0]:
                best = (enc, wn, nn)
        comps.append(best)
        rest = [n for n in rest if n not in comp]
    for _, wn, nn in sorted(comps, key=lambda c: c[0]):
        for w in sorted(wn, key=wn.get):
            wnum[w] = len(wnum)
        for n in sorted(nn, key=nn.get):
            nnum[n] = len(nnum)
    wires = [None] * len(d.wires)
    for w, k in wnum.items():
        wires[k] = d.wires[w]
    nodes = [None] * len(d.nodes)
    for n, k in nnum.items():
        nd = d.nodes[n]
        nodes[k] = Node(nd.label, tuple(wnum[w] for w in nd.inputs), tuple(wnum[w] for w in nd.outputs))
    return StringDiagram(d.signature, tuple(wires), tuple(nodes), tuple(wnum[w] for w in d.inputs),
                         tuple(wnum[w] for w in d.outputs), d.source, d.target)


def _normalize_boundaries(d: StringDiagram) -> StringDiagram:
    cs, ct = decode(encode(d.source)), decode(encode(d.target))
    return compose_all([structure_diagram(cs, d.source, d.signature), d,
                        structure_diagram(d.target, ct, d.signature)])


def equal(a: StringDiagram, b: StringDiagram, up_to_symmetry: bool = False) -> bool:
    """Hypergraph isomorphism fixing both boundaries.

    Boundary expressions are compared syntactically; with ``up_to_symmetry``
    both diagrams are first conjugated to canonical boundary expressions.
    """
    if up_to_symmetry:
        a, b = _normalize_boundaries(a), _normalize_boundaries(b)
    if a.source != b.source or a.target != b.target:
        return False
    if len(a.wires) != len(b.wires) or len(a.nodes) != len(b.nodes):
        return False
    return canonical_form(a) == canonical_form(b)


# -- node orders and decomposition -------------------------------------------

def _blocker(up, live, ins):
    """A live wire strictly between two of ``ins``, or None."""
    imask = _mask(ins)
    for y in live:
        if not imask >> y & 1 and up[y] & imask and any(up[i] >> y & 1 for i in ins):
            return y
    return None


def _schedule(d: StringDiagram, order: Sequence[int] = None) -> list:
    """Fire nodes one at a time, each on an interval of the wires alive at that point.

    Without ``order``, the enabled node of least index whose inputs form an
    interval fires next. Raise NotInterval when no node (or the next node of
    ``order``) can fire.
    """
    up = [1 << w for w in range(len(d.wires))]
    for a, b in encode(d.source).leq:
        up[d.inputs[a]] |= 1 << d.inputs[b]
    live = set(d.inputs)
    remaining = set(range(len(d.nodes)))
    todo = None if order is None else list(order)
    done = []
    while remaining:
        if todo is not None:
            n = todo[len(done)]
            if not set(d.nodes[n].inputs) <= live:
                raise NotInterval(f"node {n} ({d.nodes[n].label}) fires before its inputs exist",
                                  node=n, wires=list(d.nodes[n].inputs))
            stuck = _blocker(up, live, d.nodes[n].inputs)
        else:
            enabled = sorted(n for n in remaining if set(d.nodes[n].inputs) <= live)
            if not enabled:
                raise Cyclic("no node can fire")
            n, stuck = enabled[0], _blocker(up, live, d.nodes[enabled[0]].inputs)
            for m in enabled:
                if _blocker(up, live, d.nodes[m].inputs) is None:
                    n, stuck = m, None
                    break
        node = d.nodes[n]
        if stuck is not None:
            raise NotInterval(
                f"inputs {list(node.inputs)} of node {n} ({node.label}) are not an interval: "
                f"wire {stuck} lies between them",
                node=n, wires=list(node.inputs),
            )
        imask, omask = _mask(node.inputs), _mask(node.outputs)
        for x in live - set(node.inputs):
            if up[x] & imask:
                up[x] |= omask
            if any(up[i] >> x & 1 for i in node.inputs):
                for o in node.outputs:
                    up[o] |= 1 << x
        for a, b in encode(d.signature[node.label][1]).leq:
            up[node.outputs[a]] |= 1 << node.outputs[b]
        for i in node.inputs:
            up[i] |= omask
        _close(up)
        live = (live - set(node.inputs)) | set(node.outputs)
        remaining.discard(n)
        done.append(n)
    return done


def _topological(d: StringDiagram) -> list:
    indeg = [0] * len(d.nodes)
    for n in range(len(d.nodes)):
        for m in d.successors[n]:
            indeg[m] += 1
    heap = [n for n, k in enumerate(indeg) if k == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        n = heapq.heappop(heap)
        order.append(n)
        for m in d.successors[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                heapq.heappush(heap, m)
    if len(order) != len(d.nodes):
        raise Cyclic("the hypergraph contains a closed path")
    return order


def node_order(d: StringDiagram) -> list:
    """A firing order of the nodes, ties broken by node index.

    For a valid diagram every node fires on an interval of the wires alive at
    that point; otherwise this is the plain topological order.
    """
    try:
        return _schedule(d)
    except (NotInterval, UnknownGenerator, KeyError, IndexError):
        return _topological(d)


def is_firing_order(d: StringDiagram, order: Sequence[int]) -> bool:
    try:
        _schedule(d, order)
    except NotInterval:
        return False
    return True


def valid_node_orders(d: StringDiagram) -> Iterator[list]:
    """Every topological order in which each node fires on an interval."""
    for order in all_node_orders(d):
        if is_firing_order(d, order):
            yield order


def all_node_orders(d: StringDiagram) -> Iterator[list]:
    """Every total order of the nodes extending the wire connections."""
    preds = [set() for _ in d.nodes]
    for n in range(len(d.nodes)):
        for m in d.successors[n]:
            preds[m].add(n)

    def go(done, order):
        if len(order) == len(d.nodes):
            yield list(order)
            return
        for n in range(len(d.nodes)):
            if n not in done and preds[n] <= done:
                done.add(n)
                order.append(n)
                yield from go(done, order)
                order.pop()
                done.discard(n)

    yield from go(set(), [])


class Cut(NamedTuple):
    live: tuple            # wire ids, position i of ``poset`` is wire live[i]
    poset: TypedPoset
    tree: Expression       # decode of ``poset`` with atoms renamed to wire ids


class Step(NamedTuple):
    node: int
    before: Cut
    after: Cut
    outer: Expression      # the level: par wires plus a HOLE atom for the node
    expanded_in: Expression   # outer with the hole filled by the node's inputs
    expanded_out: Expression  # outer with the hole filled by the node's outputs


def _fill(tree, filler):
    if isinstance(tree, Atom):
        return filler if tree.name is HOLE else tree
    if isinstance(tree, Unit):
        return tree
    kids = [_fill(c, filler) for c in tree.children]
    return seq_all(kids) if isinstance(tree, Seq) else par_all(kids)


def _rename(tree, names):
    if isinstance(tree, Atom):
        return Atom(names[tree.name])
    if isinstance(tree, Unit):
        return tree
    return type(tree)(tuple(_rename(c, names) for c in tree.children))


def _make_cut(live, pos):
    try:
        t = decode_tagged(pos)
    except Exception as exc:
        raise DecompositionError(f"cut {list(live)} is not zetless") from exc
    return Cut(tuple(live), pos, _rename(t, live))


def _strengthen(d, live, pos, state) -> TypedPoset:
    """Add to a cut every order the diagram forces between its wires, forwards or backwards."""
    if "M" not in state:
        fw, bw = _forward_masks(d), _backward_masks(d)
        state["M"] = _close([f | b for f, b in zip(fw, bw)])
    M = state["M"]
    extra = [(a, b) for a, wa in enumerate(live) for b, wb in enumerate(live)
             if a != b and M[wa] >> wb & 1]
    try:
        return P.from_relation(pos.labels, list(pos.leq) + extra)
    except Exception as exc:
        raise DecompositionError(f"cut {list(live)} cannot be strengthened consistently") from exc


def _zetless_cut(d, live, pos, state):
    """Read a cut as an expression, strengthening it first if it is not zetless."""
    if not P.is_zetless(pos):
        pos = _strengthen(d, live, pos, state)
    return _make_cut(live, pos)


def _level(d, cur, members, state):
    """Saturate the cut around ``members`` and split off the node's hole."""
    try:
        sat = P.saturate_for_interval(P.SubsetRef(cur.poset, members))
        ext = P.extract(P.SubsetRef(sat, members))
        if not P.is_zetless(ext.outer):
            sat = _strengthen(d, cur.live, sat, state)
            sat = P.saturate_for_interval(P.SubsetRef(sat, members))
            ext = P.extract(P.SubsetRef(sat, members))
        outer = decode_tagged(ext.outer)
    except DecompositionError:
        raise
    except Exception as exc:
        raise DecompositionError(f"no zetless level around wires {sorted(cur.live[m] for m in members)}") from exc
    return ext, outer


def _tagged_expr(expr, wires):
    return _rename(tag(expr), list(wires))


def cuts(d: StringDiagram, order: Sequence[int] = None) -> tuple:
    """Walk ``order`` (default ``node_order``) and return ``(first cut, steps, last cut)``."""
    order = node_order(d) if order is None else list(order)
    state = {}
    live = list(d.inputs)
    first = _zetless_cut(d, live, P.restrict(encode(d.source), range(len(live))), state)
    # encode(source) is indexed by leaf position, which is the position in ``live``
    cur = first
    steps = []
    for n in order:
        node = d.nodes[n]
        pos = {w: i for i, w in enumerate(cur.live)}
        try:
            members = frozenset(pos[w] for w in node.inputs)
        except KeyError:
            raise DecompositionError(f"node {n} is not enabled at this point of the order") from None
        src, tgt = d.signature[node.label]
        inner = P.restrict(cur.poset, [pos[w] for w in node.inputs])
        if not P.is_interval(P.SubsetRef(cur.poset, members)) or not _sub_relation(inner, encode(src)):
            raise DecompositionError(f"node {n} cannot fire on cut {list(cur.live)}")
        ext, outer_tagged = _level(d, cur, members, state)
        outer_names = [cur.live[e] for e in ext.outer_elements] + [HOLE]
        outer = _rename(outer_tagged, outer_names)
        after_pos = P.substitute(ext.outer, ext.hole, P.from_relation(
            [d.wires[w] for w in node.outputs], encode(tgt).leq))
        after_live = [cur.live[e] for e in ext.outer_elements] + list(node.outputs)
        nxt = _zetless_cut(d, after_live, after_pos, state)
        steps.append(Step(n, cur, nxt, outer,
                          _fill(outer, _tagged_expr(src, node.inputs)),
                          _fill(outer, _tagged_expr(tgt, node.outputs))))
        cur = nxt
    return first, steps, cur


def _sub_relation(p: TypedPoset, q: TypedPoset) -> bool:
    return p.leq <= q.leq


def _local_diagram(d, wires_global, nodes, in_wires, out_wires, source, target):
    local = {w: i for i, w in enumerate(wires_global)}
    return StringDiagram(
        d.signature,
        tuple(d.wires[w] for w in wires_global),
        tuple(Node(d.nodes[n].label, tuple(local[w] for w in d.nodes[n].inputs),
                   tuple(local[w] for w in d.nodes[n].outputs)) for n in nodes),
        tuple(local[w] for w in in_wires),
        tuple(local[w] for w in out_wires),
        source, target,
    )


def _typed(d, tree):
    from .expr import map_types
    return map_types(lambda w: d.wires[w], tree)


def _cut_expr(d, cut):
    return _typed(d, cut.tree), list_type(cut.tree)


def _atomic_from_step(d, step):
    n = step.node
    src, in_order = _cut_expr(d, step.before)
    tgt, out_order = _cut_expr(d, step.after)
    ws = list(step.before.live) + list(d.nodes[n].outputs)
    return _local_diagram(d, ws, [n], in_order, out_order, src, tgt)


class Decomposition(NamedTuple):
    prefix: StringDiagram    # structure diagram: source -> first cut
    atomics: list
    suffix: StringDiagram    # structure diagram: last cut -> target


def decomposition(d: StringDiagram, order: Sequence[int] = None) -> Decomposition:
    first, steps, last = cuts(d, order)
    src0, order0 = _cut_expr(d, first)
    prefix = _local_diagram(d, list(d.inputs), [], list(d.inputs), order0, d.source, src0)
    tgt1, order1 = _cut_expr(d, last)
    if not _sub_relation(last.poset, P.restrict(
            _reindex(encode(d.target), d.outputs, last.live), range(len(last.live)))):
        raise DecompositionError("final cut does not include into the target")
    suffix = _local_diagram(d, list(last.live), [], order1, list(d.outputs), tgt1, d.target)
    return Decomposition(prefix, [_atomic_from_step(d, s) for s in steps], suffix)


def _reindex(enc: TypedPoset, boundary, live) -> TypedPoset:
    """``enc`` is indexed by boundary position; reindex it by position in ``live``."""
    where = {w: i for i, w in enumerate(live)}
    perm = [boundary.index(w) for w in live]
    inv = {b: where[w] for b, w in enumerate(boundary)}
    leq = frozenset((inv[a], inv[b]) for a, b in enc.leq)
    return TypedPoset(tuple(enc.labels[p] for p in perm), leq)


def decompose(d: StringDiagram, order: Sequence[int] = None) -> list:
    """Atomic diagrams, one per node, in ``order`` (default ``node_order``)."""
    return decomposition(d, order).atomics


def atomic(d: StringDiagram, order: Sequence[int], n: int) -> StringDiagram:
    _, steps, _ = cuts(d, order)
    for s in steps:
        if s.node == n:
            return _atomic_from_step(d, s)
    raise ValueError(f"node {n} is not in the order")


def recompose(dec: Decomposition) -> StringDiagram:
    return compose_all([dec.prefix, *dec.atomics, dec.suffix])


# -- serialization and rendering ---------------------------------------------------

def to_json(d: StringDiagram) -> dict:
    nodes = [{"id": INPUT, "label": None, "inputs": [], "outputs": list(d.inputs)}]
    nodes += [{"id": k, "label": n.label, "inputs": list(n.inputs), "outputs": list(n.outputs)}
              for k, n in enumerate(d.nodes)]
    nodes.append({"id": OUTPUT, "label": None, "inputs": list(d.outputs), "outputs": []})
    return {
        "source": to_text(d.source),
        "target": to_text(d.target),
        "wires": [{"id": w, "label": t} for w, t in enumerate(d.wires)],
        "nodes": nodes,
        "boundary": {"input": INPUT, "output": OUTPUT},
    }


def from_json(data, signature: Signature = None) -> StringDiagram:
    if isinstance(data, str):
        data = json.loads(data)
    wires = sorted(data["wires"], key=lambda w: w["id"])
    if [w["id"] for w in wires] != list(range(len(wires))):
        raise ValueError("wire ids must be 0 .. n-1")
    b = data.get("boundary", {"input": INPUT, "output": OUTPUT})
    ins = outs = None
    nodes = []
    for nd in data["nodes"]:
        if nd["id"] == b["input"]:
            ins = tuple(nd["outputs"])
        elif nd["id"] == b["output"]:
            outs = tuple(nd["inputs"])
        else:
            nodes.append((nd["id"], Node(nd["label"], nd["inputs"], nd["outputs"])))
    if ins is None or outs is None:
        raise ValueError("both boundary nodes are required")
    nodes.sort(key=lambda p: p[0])
    return StringDiagram(signature, tuple(w["label"] for w in wires), tuple(n for _, n in nodes),
                         ins, outs, parse(data["source"]), parse(data["target"]))


def to_dot(d: StringDiagram, poset: bool = False, name: str = "diagram") -> str:
    lines = [f"digraph {name} {{", "  rankdir=TB;", "  node [shape=box];"]
    lines.append('  in [shape=point, label=""];  { rank=source; in; }')
    lines.append('  out [shape=point, label=""];  { rank=sink; out; }')
    for k, n in enumerate(d.nodes):
        lines.append(f'  n{k} [label="{n.label}"];')

    def end(x, side):
        return {INPUT: "in", OUTPUT: "out"}.get(x, f"n{x}")

    for w in range(len(d.wires)):
        p = d.producer[w][0]
        c = d.consumer[w][0]
        lines.append(f'  {end(p, 0)} -> {end(c, 1)} [label="{d.wires[w]}:{w}"];')
    if poset:
        for x, y in derived_poset(d).covers():
            lines.append(f'  w{x} -> w{y} [style=dashed, constraint=false];')
        used = sorted({w for x, y in derived_poset(d).covers() for w in (x, y)})
        for w in used:
            lines.append(f'  w{w} [shape=plaintext, label="{d.wires[w]}:{w}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_ascii(d: StringDiagram) -> str:
    po = derived_poset(d)

    def ws(xs):
        return "[" + ", ".join(f"{w}:{d.wires[w]}" for w in xs) + "]"

    lines = [f"{to_text(d.source)}  ->  {to_text(d.target)}", f"  in  {ws(d.inputs)}"]
    for n in node_order(d):
        node = d.nodes[n]
        lines.append(f"  {node.label:<6} {ws(node.inputs)} -> {ws(node.outputs)}")
    lines.append(f"  out {ws(d.outputs)}")
    outs = set(d.outputs)
    rel = [f"{x}<={y}" for x, y in po.covers() if x in outs and y in outs]
    lines.append("  output order: " + (", ".join(rel) if rel else "(none)"))
    return "\n".join(lines) + "\n"
