"""Scan the scalar function driving the baseline risk bound.

f(lam) = lam * E[log((x + 1/2)/lam)] for x ~ Po(lam). The baseline risk per
coordinate is the integral of (1/2 - f(t*lam))/t over the exposure window,
so the interesting facts are: f stays above -0.02 everywhere, dips to about
-0.0106 near lam = 5, and vanishes at both ends.
"""

import numpy as np

from poispred import f_shrink, f_shrink_with_err, L_truncated

lams = np.arange(0.05, 20.0001, 0.05)
vals = np.array([f_shrink(float(l)) for l in lams])

i = int(np.argmin(vals))
print(f"grid minimum: f({lams[i]:.2f}) = {vals[i]:.8f}")
print(f"sign change between {lams[np.where(np.diff(np.sign(vals)))[0][0]]:.2f} "
      f"and {lams[np.where(np.diff(np.sign(vals)))[0][0] + 1]:.2f}")

print("\n  lam      f(lam)          certified err")
for lam in (0.1, 0.5, 1.0, 3.0, 4.0, 5.0, 7.0, 10.0, 100.0, 1000.0):
    v, e = f_shrink_with_err(lam)
    print(f"{lam:>6.1f}  {v:>14.10f}  {e:.2e}")

# the 21-term truncation is a lower bound at small lam (dropped terms > 0)
print("\ntruncated series vs full value:")
for lam in (3.0, 4.0, 5.0):
    L = L_truncated(lam)
    v = f_shrink(lam)
    print(f"  lam={lam}: L={L:.10f}  f={v:.10f}  L<f: {L < v}")

lo = vals.min()
print(f"\nglobal floor check on the grid: min f = {lo:.6f} > -0.02: {lo > -0.02}")
print(f"ceiling check: max f = {vals.max():.6f} < 0.5 (Jensen): {vals.max() < 0.5}")
