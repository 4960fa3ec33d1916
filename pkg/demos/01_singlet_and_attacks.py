"""How the two security parameters respond to the honest source and to simple attacks.

Run: python3 demos/01_singlet_and_attacks.py
"""

from wigner_qkd import (
    InterceptResendBoth,
    InterceptResendOne,
    NoAttack,
    SourceControlProduct,
    deg,
    qber,
    realize_attack,
    wigner_w,
)

cases = [
    ("honest singlet", NoAttack()),
    ("product source (0, 0)", SourceControlProduct(deg(0), deg(0))),
    ("product source (113.3, 66.7)", SourceControlProduct(deg(113.3), deg(66.7))),
    ("intercept-resend on A, basis 0", InterceptResendOne(deg(0))),
    ("intercept-resend on both, (22.5, 120)", InterceptResendBoth(deg(22.5), deg(120))),
]

print(f"{'source':40s} {'W':>9s} {'W~':>9s} {'QBER':>7s}")
for name, strategy in cases:
    state = realize_attack(strategy)
    r = wigner_w(state)
    print(f"{name:40s} {r.w:9.4f} {r.w_tilde:9.4f} {qber(state):7.4f}")

# The singlet sits at -1/8. A local source needs W >= 0, yet the product
# source above drives W below the quantum value while W~ stays positive.
