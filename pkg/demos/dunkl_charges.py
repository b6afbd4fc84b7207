"""Dunkl operators on a three-branch star graph and their power sums.

    python demos/dunkl_charges.py
"""
from halfloop.dunkl import Algebra, DunklSpec, power_sum, verify_dunkl_commutativity
from halfloop.fixtures import calibrated_hbar, render_hbar

alg = Algebra(DunklSpec(n=3, L=2, mu="zero"))
for check in verify_dunkl_commutativity(alg):
    print(f"{check.status:4} {check.name}")

print("I^(1) in normal form:")
print(power_sum(alg, 1).render())

cal = calibrated_hbar()
for line in cal.log:
    print(" ", line)
print("hbar =", render_hbar(cal.value))
