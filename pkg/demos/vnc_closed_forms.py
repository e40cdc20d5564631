"""The very noisy channel: closed forms against the generic optimizer.

Run with ``python3 demos/vnc_closed_forms.py``.
"""

# %%
# For a very noisy channel of capacity C every exponent has a closed form,
# which makes it a clean check on the numerical machinery.
import numpy as np

from arq_exponents import analytic, deadline, erasure, gallager
from arq_exponents.channels import Vnc

C = 1.0
ch = Vnc(C)

# %%
print("   R     E_r(closed)  E_r(numeric)  E_F(closed)  E_F(numeric)")
for R in np.linspace(0.0, 0.9, 7):
    print(f"  {R:.2f}   {analytic.vnc_er(R, C):10.6f}  {gallager.random_coding_exponent(ch, R):12.6f}"
          f"  {analytic.vnc_ef(R, C):11.6f}  {erasure.feedback_exponent(ch, R):12.6f}")

# %%
# With four rounds the IR bound is min(E_F, 4 E_r(R/4)) and 4 E_r(R/4) = 2 - R
# dominates E_F = 2 - 2 sqrt(R), so IR with L = 4 attains E_F at every rate.
R = np.linspace(0.0, 1.0, 11)
print("IR(L=4) == E_F:", all(analytic.vnc_ir_bound(r, C, 4) == analytic.vnc_ef(r, C) for r in R))

# %%
# Memoryless decoding cannot do the same: its upper bound L E_sp drops below
# E_F once the rate is moderate.
for L in (2, 4):
    gap = [(r, deadline.md_upper_bound(ch, r, L) - analytic.vnc_ef(r, C)) for r in (0.1, 0.3, 0.6)]
    print(f"L = {L}: md_upper - E_F at R = " + ", ".join(f"{r}: {d:+.4f}" for r, d in gap))
