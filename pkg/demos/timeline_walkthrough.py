"""Walk through the two-process timeline diagram.

Loads the bundled fixture, validates it, prints the order it induces on the
output wires, then lists every firing order with its atomic decomposition.
"""
from pathlib import Path

import duoidal
from duoidal import diagram as D
from duoidal.expr import to_text
from duoidal.terms import load

FIXTURES = Path(duoidal.__file__).parent / "fixtures"


def main():
    d = load(FIXTURES / "timeline.duo").diagram("timeline")
    D.validate(d)
    print(f"timeline : {to_text(d.source)} -> {to_text(d.target)}")
    print(D.to_ascii(d))

    po = D.derived_poset(d)
    name = {w: f"{d.wires[w].lower()}{w}" for w in range(len(d.wires))}
    print("output order:")
    for a in d.outputs:
        for b in d.outputs:
            if po.lt(a, b):
                print(f"  {name[a]} < {name[b]}")

    for order in D.valid_node_orders(d):
        labels = [d.nodes[n].label for n in order]
        print(f"firing order {labels}:")
        for step in D.decompose(d, order):
            print(f"  {to_text(step.source)} -> {to_text(step.target)}")


if __name__ == "__main__":
    main()
