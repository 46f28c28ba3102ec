"""Count zetless posets and evaluate a diagram in the built-in algebras."""
from pathlib import Path

import duoidal
from duoidal import diagram as D
from duoidal.evaluation import SelfAlgebra, WeightAlgebra, eval_diagram
from duoidal.expr import to_text
from duoidal.terms import load
from duoidal.zetless import decode, enumerate_zetless

FIXTURES = Path(duoidal.__file__).parent / "fixtures"


def main():
    for n in range(1, 6):
        print(f"zetless posets on {n} elements of one type: {len(enumerate_zetless(n, ['A']))}")
    print("size 2 over {A, B}:")
    for p in enumerate_zetless(2, ["A", "B"]):
        print(f"  {to_text(decode(p))}")

    d = load(FIXTURES / "timeline.duo").diagram("timeline")
    weights = {"f": 2, "g": 3}
    for order in D.valid_node_orders(d):
        print(f"weight along {order}: {eval_diagram(WeightAlgebra(weights), d, order)}")
    back = eval_diagram(SelfAlgebra(d.signature), d)
    print(f"self evaluation gives back the same diagram: {D.equal(back, d)}")


if __name__ == "__main__":
    main()
