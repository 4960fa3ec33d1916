"""Full simulated sessions: honest, attacked and noisy, with verdicts from both tests.

Run: python3 demos/04_session_verdicts.py
"""

from wigner_qkd import (
    InterceptResendOne,
    NoAttack,
    NoiseModel,
    SamplerConfig,
    optimize_attack,
    run_session,
    security_verdict,
)

best = optimize_attack("min_w", "product").strategy
runs = [
    ("honest", NoAttack(), NoiseModel()),
    ("honest, lossy and noisy", NoAttack(), NoiseModel(0.8, 1e-3, 0.05)),
    ("product source minimizing W", best, NoiseModel()),
    ("intercept-resend on A", InterceptResendOne(0.0), NoiseModel()),
]

for name, strategy, noise in runs:
    rec = run_session(strategy, config=SamplerConfig(10**6, seed=1, noise=noise), threads=4)
    wr = rec.wigner
    print(name)
    print(f"  W  = {wr.w:+.4f} +- {wr.sigma_w:.4f} -> {security_verdict(rec, 'w').value}")
    print(f"  W~ = {wr.w_tilde:+.4f} +- {wr.sigma_w_tilde:.4f} -> {security_verdict(rec, 'w_tilde').value}")
    print(f"  QBER {rec.qber_estimate:.4f}, final key {rec.final_key_alice.size} bits")
