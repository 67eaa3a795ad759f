"""
Exact arithmetic in GF(q)
=========================

Builds a few finite fields, shows the deterministic modulus selection,
and exercises the arithmetic that everything else in the library sits on.
"""
from xorlab.field import build_field

print("=" * 60)
print("Prime field GF(7)")
f7 = build_field(7)
print(f"  p={f7.p} e={f7.e}  3 + 5 = {f7.add(3, 5)}  3 * 5 = {f7.mul(3, 5)}")
print(f"  inverse of 4: {f7.inv(4)}  (check: 4 * {f7.inv(4)} = {f7.mul(4, f7.inv(4))})")

print()
print("Extension field GF(8) = GF(2^3)")
f8 = build_field(8)
print(f"  modulus coefficients (low order first): {f8.modulus}")
print("  i.e. x^3 + x + 1, the lexicographically smallest irreducible cubic")
x = 2  # the element 'x' in the integer encoding
print(f"  x * x     = {f8.mul(x, x)}   (x^2 encodes as 4)")
print(f"  x^3       = {f8.pow(x, 3)}   (x + 1 encodes as 3, forced by the modulus)")
print(f"  x^7       = {f8.pow(x, 7)}   (multiplicative order divides q - 1 = 7)")

print()
print("Frobenius in GF(9): (a + b)^3 = a^3 + b^3")
f9 = build_field(9)
ok = all(
    f9.pow(f9.add(a, b), 3) == f9.add(f9.pow(a, 3), f9.pow(b, 3))
    for a in f9.elements()
    for b in f9.elements()
)
print(f"  holds for all {f9.q * f9.q} pairs: {ok}")

print()
print("Non prime powers are rejected:")
try:
    build_field(6)
except ValueError as exc:
    print(f"  build_field(6) -> ValueError: {exc}")
