"""Spin version at n=2: projectors onto the symmetric, quasi-parity-respecting sector and the vanishing pattern of the projected charges.

    python demos/projected_charges.py
"""
from halfloop.dunkl import Algebra, DunklSpec, verify_projector_identities, verify_tilde_vanishing

alg = Algebra(DunklSpec(n=2, L=2, N=2, multiplicities=(1, 1), truncation=3))
for check in verify_projector_identities(alg) + verify_tilde_vanishing(alg):
    print(f"{check.status:4} {check.name}")
