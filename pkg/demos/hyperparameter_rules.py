"""The three data-driven ways to pick the gamma prior rate.

Draws one synthetic data set, then shows the moment rule, the scaled-total
(MLE) rule, and the unbiased-risk-estimate rule on it. The punchline is
that the risk-estimate curve is minimized exactly at the MLE value, which
the demo confirms both analytically and by golden-section search.
"""

import numpy as np

from poispred import (
    Counts,
    ModelConfig,
    alpha_mle,
    alpha_moment,
    ure_argmin,
    ure_argmin_numeric,
    ure_value,
)

rng = np.random.default_rng(7)
cfg = ModelConfig(d=6, r=2.0, s=1.0)
lam = rng.gamma(shape=1.2, scale=0.9, size=cfg.d)
x = Counts.of(rng.poisson(cfg.r * lam))

print(f"true rates : {np.round(lam, 3)}")
print(f"observed x : {x.values} (total {x.total})\n")

b = 0.5 * cfg.d - 1.0
print(f"moment rule (b = d/2 - 1 = {b}) : alpha = {alpha_moment(x.total, cfg.r, b):.6f}")
print(f"scaled-total rule              : alpha = {alpha_mle(x.total, cfg.r, cfg.d):.6f}")

a_ana = ure_argmin(x, cfg)
a_num = ure_argmin_numeric(x, cfg)
print(f"risk-estimate rule, analytic   : alpha = {a_ana:.10f}")
print(f"risk-estimate rule, searched   : alpha = {a_num:.10f}")
print(f"agreement: {abs(a_ana - a_num):.2e}\n")

print("risk-estimate curve (alpha, U(alpha)):")
for a in np.geomspace(a_ana / 8, a_ana * 8, 9):
    marker = "  <- minimum" if abs(a - a_ana) < 1e-9 else ""
    print(f"  {a:>10.5f}  {ure_value(float(a), x, cfg):.8f}{marker}")

u_min = ure_value(a_ana, x, cfg)
assert all(ure_value(float(a), x, cfg) >= u_min for a in np.geomspace(1e-3, 1e3, 200))
print("\ngrid sweep confirms no lower value anywhere in [1e-3, 1e3]")
