"""
exterior/models.py - Model G2 and split-G2 forms
G2 Variational Lab
"""

from exterior.algebra import ConstForm

PHI0 = ConstForm.from_terms(3, {
    (1, 2, 3): 1, (1, 4, 5): 1, (1, 6, 7): 1, (2, 4, 6): 1,
    (2, 5, 7): -1, (3, 4, 7): -1, (3, 5, 6): -1,
})

PSI0 = ConstForm.from_terms(4, {
    (4, 5, 6, 7): 1, (2, 3, 6, 7): 1, (2, 3, 4, 5): 1, (1, 3, 5, 7): 1,
    (1, 3, 4, 6): -1, (1, 2, 5, 6): -1, (1, 2, 4, 7): -1,
})

PHI0_SPLIT = ConstForm.from_terms(3, {
    (1, 2, 3): 1, (1, 4, 5): -1, (1, 6, 7): -1, (2, 4, 6): 1,
    (2, 5, 7): -1, (3, 4, 7): -1, (3, 5, 6): -1,
})

PSI0_SPLIT = ConstForm.from_terms(4, {
    (4, 5, 6, 7): 1, (2, 3, 6, 7): -1, (2, 3, 4, 5): -1, (1, 3, 5, 7): 1,
    (1, 3, 4, 6): -1, (1, 2, 5, 6): -1, (1, 2, 4, 7): -1,
})

# Restatements with dx^{247} in place of dx^{257}; kept as named fixtures only.
PHI0_SPLIT_247 = ConstForm.from_terms(3, {
    (1, 2, 3): 1, (1, 4, 5): -1, (1, 6, 7): -1, (2, 4, 6): 1,
    (2, 4, 7): -1, (3, 4, 7): -1, (3, 5, 6): -1,
})

PHI0_247 = ConstForm.from_terms(3, {
    (1, 2, 3): 1, (1, 4, 5): 1, (1, 6, 7): 1, (2, 4, 6): 1,
    (2, 4, 7): -1, (3, 4, 7): -1, (3, 5, 6): -1,
})

VOL0 = ConstForm.basis_form((1, 2, 3, 4, 5, 6, 7))

EUCLIDEAN = tuple(tuple(1 if i == j else 0 for j in range(7)) for i in range(7))
SPLIT_SIGNS = (1, 1, 1, -1, -1, -1, -1)
SPLIT_METRIC = tuple(
    tuple(SPLIT_SIGNS[i] if i == j else 0 for j in range(7)) for i in range(7)
)

# Standard Cartan involution of the split structure.
C0 = SPLIT_METRIC

NAMED_FORMS = {
    'phi0': PHI0,
    'psi0': PSI0,
    'phi0~': PHI0_SPLIT,
    'psi0~': PSI0_SPLIT,
    'phi0~/247': PHI0_SPLIT_247,
    'phi0/247': PHI0_247,
    'vol0': VOL0,
}
