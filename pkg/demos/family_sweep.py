"""Sweep the one-parameter family 754321:9 and watch the signature set change.

Some samples have irrational solutions; those metrics are reported as
128-bit approximations certified by interval arithmetic.
"""
from fractions import Fraction

from nilsol.nilsoliton import sweep

TEXT = "(0,0,(1-a)e^{12},e^{13},ae^{14}+e^{23},e^{15}+e^{24},e^{16}+e^{25}+e^{34})"
samples = [Fraction(-2), Fraction(-1, 20), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(2)]

for params, rep in sweep(TEXT, {"a": samples}, name="754321:9"):
    a = params["a"]
    if isinstance(rep, Exception):
        print(f"a = {a}: {rep}")
        continue
    kinds = sorted({s.kind for s in rep.solutions})
    print(f"a = {str(a):>6}: {len(rep.S):2d} signatures {{{','.join(rep.S)}}}  solver: {','.join(kinds)}")
