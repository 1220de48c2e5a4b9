"""
Bracket towers and spanning certificates
========================================

A degenerate diffusion acts only on the first m0 of n coordinates; a linear
drift x -> Bx is what carries smoothing into the remaining ones.  This demo
builds the commutator tower X_{p,0} = d/dx_p, X_{p,q} = [X_{p,q-1}, X] in
exact rational arithmetic and certifies whether the tower spans all of R^n.
"""

from fractions import Fraction

from ultraparabolic import (
    bracket_tower,
    hormander_check,
    load_builtin,
    span_decompose,
)

# ----------------------------------------------------------------------
# the two-dimensional chain: one diffusion direction, drift x0 d/dx1
spec = load_builtin("kolmogorov2d")
tower = spec.tower()
print(f"{spec.name}: n = {spec.n}, m0 = {spec.m0}, tower depth r = {tower.r}")
for p in range(spec.m0):
    for q in range(tower.r + 1):
        print(f"  X_({p},{q}) row = {tuple(map(str, tower.rows[p][q]))}")

# the certificate records which (p, q) rows witness the full rank
cert = hormander_check(tower)
print(f"spanning: {cert.satisfied} (rank {cert.rank} of {spec.n}, "
      f"witness rows {cert.witness})")

# every coordinate direction decomposes exactly over the witness rows;
# K is the largest coefficient magnitude appearing in that decomposition
decomp = span_decompose(tower)
print(f"decomposition constant K = {decomp.K}")
for j, coeffs in sorted(decomp.coefficients.items()):
    terms = " + ".join(f"({c}) X_{pq}" for pq, c in sorted(coeffs.items()))
    print(f"  e_{j} = {terms}")

# ----------------------------------------------------------------------
# a three-level chain needs two commutators to reach the last coordinate
chain = load_builtin("chain3")
t3 = chain.tower()
print(f"\n{chain.name}: depth r = {t3.r}, "
      f"rank {hormander_check(t3).rank} of {chain.n}")

# ----------------------------------------------------------------------
# without any drift the diffusion directions are all one ever gets:
# the tower stops at depth 0 and the check reports the rank honestly
flat = bracket_tower([[Fraction(0)] * 2 for _ in range(2)], m0=1)
flat_cert = hormander_check(flat)
print(f"\nzero drift, m0 = 1: depth r = {flat.r}, satisfied = {flat_cert.satisfied} "
      f"(rank {flat_cert.rank} of 2)")
