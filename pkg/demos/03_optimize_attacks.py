"""Search each attack family for the source that best fakes (or spoils) the test.

Run: python3 demos/03_optimize_attacks.py
"""

from wigner_qkd import optimize_attack

for family in ("product", "intercept-one", "intercept-both"):
    for objective in ("min_w", "min_w_tilde"):
        rep = optimize_attack(objective, family, grid_step=1.0, threads=4)
        params = ", ".join(f"{p:.2f}" for p in rep.best_params)
        print(f"{family:15s} {objective:12s} {rep.best_value:9.5f}  at ({params}) deg")

# Only the product family gets below zero on W; none gets below zero on W~.
