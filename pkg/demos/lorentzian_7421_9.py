"""Walk through 7421:9, an algebra with Lorentzian but no Riemannian nilsoliton.

Run with ``python demos/lorentzian_7421_9.py``.
"""
from nilsol.algebra import parse_nice_algebra
from nilsol.geometry import einstein_extension, ricci_koszul, verify_nilsoliton
from nilsol.nilsoliton import build_P, classify, condition_K, nikolayevsky, riemannian_exists

alg = parse_nice_algebra("(0,0,0,-e^{12},e^{13},e^{14}+e^{23},e^{16}+e^{34})", name="7421:9")

print("root matrix rows (one per bracket):")
for row in alg.root_matrix.matrix.data:
    print("  ", tuple(row))

print("Nikolayevsky derivation N =", nikolayevsky(alg))

fam = condition_K(alg)
x0 = ",".join(map(str, fam.X0))
print(f"solutions of M tM X = [1]: X0 = ({x0}) plus span {fam.kernel}")
for eq in build_P(alg, fam).describe():
    print("  polynomial condition:", eq)

rep = classify(alg)
for sol in rep.solutions:
    print("admissible X =", sol)
print("signatures:", ", ".join(rep.S))
print("Riemannian nilsoliton exists:", riemannian_exists(alg))

for d, g in rep.metrics:
    cert = verify_nilsoliton(alg, g)
    print(f"  signature {d:>6}: g = {g}   lambda = {cert.lam}")

g = dict(rep.metrics)["5"]
ext = einstein_extension(alg, g)
ric = ricci_koszul(ext.algebra)
print(f"Einstein extension: e0 coefficient {ext.e0_coefficient}, Ricci = {set(map(str, ric.diagonal))}")
