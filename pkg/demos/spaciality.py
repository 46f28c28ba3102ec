"""A scalar on the unit commutes with every wire.

``id[A] > alpha``, ``alpha > id[A]`` and ``id[A] * alpha`` all elaborate to
the same string diagram, because a node with no wires adds no order.
"""
from pathlib import Path

import duoidal
from duoidal import diagram as D
from duoidal.terms import load

FIXTURES = Path(duoidal.__file__).parent / "fixtures"


def main():
    f = load(FIXTURES / "spacial.duo")
    names = ["lhs", "rhs", "beside"]
    for a in names:
        for b in names:
            if a < b:
                same = D.equal(f.diagram(a), f.diagram(b))
                print(f"{a} == {b}: {same}")


if __name__ == "__main__":
    main()
