"""Products of the base flow with the sectoral mode Y_2^2.

The construction needs the expansions of ``Psi Y_2^2`` and ``Psi^2 Y_2^2``
for ``Psi = beta Y_2^0 + gamma Y_1^0``, plus the identity that ties the
zonal and sectoral modes of one degree.
"""

from eulersphere.gaunt import gaunt_identity_ratio, product_table, rh_product_tables, triple_product

beta, gamma = 1.0, 1.0
first, second = rh_product_tables(beta, gamma)
print("Psi * Y_2^2")
for n, m, c in product_table(first):
    print(f"  Y_{n}^{m}: {c: .12f}")
print("Psi^2 * Y_2^2")
for n, m, c in product_table(second):
    print(f"  Y_{n}^{m}: {c: .12f}")

print("\n<Y_2^0 Y_2^2 Y_2^2> =", triple_product((2, 0), (2, 2), (2, 2)))

# <f(Y_n^0), Y_n^0> = C <f'(Y_n^0) Y_n^1, Y_n^1>; C comes out as 1
for n in range(1, 6):
    r = gaunt_identity_ratio(n, [0.0, 0.3, -1.0, 0.5])
    print(f"n={n}: C = {r.ratio:.15f}")
