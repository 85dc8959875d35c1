"""Betti numbers of a few small Lie algebras, with exact witnesses."""
from algebroidkit import CEComplex, TensorForm, betti, d, exactness_witness
from algebroidkit.algebroid import point, product, rename_frames
from algebroidkit.catalog import abelian, aff1, heisenberg, so3

sl2 = point(("h", "e", "f"),
            {("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}}, name="sl2")
algebras = [abelian(3), so3(), sl2, aff1(), heisenberg(),
            product(rename_frames(abelian(2), {"e1": "f1", "e2": "f2"}), so3(), name="R2 x so3")]
for g in algebras:
    print(f"{g.label:>10}: {betti(g)}")

g = aff1()
area = TensorForm.from_frames(g, {("e1", "e2"): 1})
xi = exactness_witness(g, area)
print(f"\naff1: e1^e2 = d({xi}); check: {d(xi) == area}")
print("differentials:", CEComplex.of(g).to_json())
