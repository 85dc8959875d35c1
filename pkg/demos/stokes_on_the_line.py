"""Fiber integration and the Stokes identity for t*x dt on T(R) x T(R).

Run: python3 demos/stokes_on_the_line.py
"""
from algebroidkit import Poly, TensorForm, Tensor, CubeAvg, prolong, stokes_residual
from algebroidkit.catalog import tr1

A = tr1()
P = prolong(1, A)
t, x = Poly.var("t1", P.space), Poly.var("x", P.space)
w = TensorForm.from_frames(P, {("dt1",): t * x})


def show(f):
    return "0" if f.is_zero() else str(f)


rep = stokes_residual(1, w)
print("form:         ", w)
print("int d w:      ", show(rep.integral_of_d))
print("d int w:      ", show(rep.d_of_integral))
print("face sum:     ", show(rep.face_sum))
print("residual:     ", show(rep.residual))

# a nonlocal version: average the coefficient over x in [0, 1]
nu = CubeAvg(Tensor(w, label="w"), ["x"])
rep = stokes_residual(1, nu, [A.frame_section(0)])
print()
print("rform:        ", nu.to_text())
print("residual on d/dx:", rep.residual)
