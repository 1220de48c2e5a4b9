"""
Time-weighted auxiliary fields and their exact identities
=========================================================

The regularity machinery rests on auxiliary fields H_{delta,p}: combinations
sum_k I^k(t^delta) X_{p,k} of the tower fields, weighted by iterated time
antiderivatives of t^delta.  Their defining property is that commutation with
the full transport operator d/dt + X collapses to a single weighted
coordinate derivative.  All of this is symbolic: polynomials in t and x with
Fraction coefficients and a rational exponent offset, so "verified" below
means identically zero residual, not small.
"""

import random
from fractions import Fraction

from ultraparabolic import (
    GradedPolynomial,
    antiderivative,
    build_H,
    build_Hk_closed,
    build_Hk_recursive,
    invert_to_X,
    load_builtin,
    random_graded_polynomial,
    verify_commutator_identity,
)

spec = load_builtin("kolmogorov2d")
tower = spec.tower()
delta = Fraction(3, 2)

# ----------------------------------------------------------------------
# the antiderivative operator I on t^delta produces Gamma-ratio weights
print("iterated antiderivatives of t^(3/2):")
t_delta = GradedPolynomial.monomial(spec.n, delta, (0,) * spec.n)
for k in range(3):
    print(f"  I^{k}(t^{delta}) = {antiderivative(t_delta, k)}")

# ----------------------------------------------------------------------
# closed form and recursion build the same graded fields, exactly
for k in range(tower.r + 1):
    closed = build_Hk_closed(tower, delta, 0, k)
    recursive = build_Hk_recursive(tower, delta, 0, k)
    assert closed == recursive
    print(f"H^({k}) closed == recursive: True")

# ----------------------------------------------------------------------
# the commutator identity, checked on random graded polynomials
H = build_H(tower, delta, 0)
X = tower.drift_field()
rng = random.Random(42)
for d in range(1, 4):
    f = random_graded_polynomial(tower.n, rng)
    residual = verify_commutator_identity(H, X, d, f)
    print(f"d = {d}: residual on a random polynomial is zero: {residual.is_zero()}")

# ----------------------------------------------------------------------
# inversion: the weighted tower fields are recovered as exact combinations
for level in range(tower.r + 1):
    cert = invert_to_X(tower, delta, 0, level)
    combo = {f"k={k}": str(c) for (_, k), c in sorted(cert.combination.items())}
    print(f"level {level}: exact = {cert.exact}, combination = {combo}")

# ----------------------------------------------------------------------
# the residual is a genuine detector: corrupt one tower row and it fires
from ultraparabolic import BracketTower

rows = ((tower.rows[0][0], (Fraction(0), Fraction(6, 5))),)  # perturbed level 1
tampered = BracketTower(n=2, m0=1, r=1, rows=rows, drift_matrix=tower.drift_matrix)
bad_H = build_H(tampered, delta, 0)
residual = verify_commutator_identity(bad_H, X, 1, random_graded_polynomial(2, rng))
print(f"tampered tower detected (nonzero residual): {not residual.is_zero()}")
