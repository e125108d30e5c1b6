"""Reference numbers computed once with mpmath at 30 digits and frozen here.

test_frozen_values.py recomputes each one independently so a typo in this
file cannot go unnoticed.
"""

# tau * (32 / 2) ** 0.6
PRIVATE_32_OVER_2_BETA06 = 5.27803164309157703749600788492
# d_noc = 4, plus tau * (64 / 16) ** 0.45
SHARED_64_N16_BETA045 = 5.86606598307361483196268653230
# 0.01 + 0.99 * 0.1 * 0.8 / sqrt(16)
M1_DEPTH1_EXAMPLE = 0.0298
# 0.9 * 1 + 0.1 * 0.8 * 6 + 0.1 * 0.2 * 200
D12_EXAMPLE = 5.38
# 0.25 * 2 ** 1.4
AREA_2SIGMA = 0.659753955386447129687000985615
