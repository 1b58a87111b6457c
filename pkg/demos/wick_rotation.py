"""Wick rotations of a Riemannian nilsoliton on 631:5a.

A grading W whose parity lies in the kernel of the mod-2 root matrix turns a
nilsoliton into another one, possibly on a different real form.
"""
from nilsol.algebra import parse_nice_algebra
from nilsol.exactnum import gf2
from nilsol.geometry import DiagonalMetric, verify_nilsoliton, wick_rotate

alg = parse_nice_algebra("(0,0,0,e^{12},e^{13},e^{24}+e^{35})", name="631:5a")
g = DiagonalMetric.parse("1,-1,1,-1/4,1/4,1/16")
print("start:", alg.to_notation(), "with g =", g, "lambda =", verify_nilsoliton(alg, g).lam)

print("kernel of the mod-2 root matrix:", gf2.kernel(alg.root_matrix.mod2, alg.dim))

for W in [(0, 1, 0, 1, 0, 0), (1, 1, 0, 0, 1, 1), (1, 1, 0, 2, 1, 1)]:
    rotated, g_w = wick_rotate(alg, W, g)
    print(f"W = {W}: {rotated.to_notation()}  g = {g_w}  lambda = {verify_nilsoliton(rotated, g_w).lam}")
    back, g_back = wick_rotate(rotated, W, g_w)
    assert back.brackets == alg.brackets and g_back == g
