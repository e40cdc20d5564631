"""How much does a deadline cost on a BSC(0.15)?

Run with ``python3 demos/bsc_deadline.py`` (about half a minute).
"""

# %%
# Feedback lets a decoder erase and ask again. Without a deadline the best
# exponent is E_F; with at most L rounds, memoryless decoding is bracketed by
# md_lower and md_upper, and incremental redundancy achieves ir_lower.
import numpy as np

from arq_exponents import deadline
from arq_exponents.channels import Bsc, capacity, to_bits, to_nats
from arq_exponents.curves import curve_table

ch = Bsc(0.15)
C_bits = to_bits(capacity(ch))
print(f"capacity {C_bits:.5f} bits")

# %%
# A coarse grid is enough to see the shape. Exponents stay in nats.
bits = np.linspace(0.0, C_bits, 17)
names = ("e_r", "e_f", "md_lower", "md_upper", "ir_lower")
for L in (2, 4):
    t = curve_table(ch, to_nats(bits), names, L=L)
    print(f"\nL = {L}")
    print("  R[bits]    E_r      E_F   md_lower md_upper ir_lower")
    for i, R in enumerate(bits):
        print(f"  {R:7.4f}" + "".join(f" {t[n][i]:8.4f}" for n in names))

# %%
# At L = 2 the IR bound only reaches E_F at high rates; at L = 4 it matches
# E_F everywhere, while memoryless decoding still falls short at high rates.
# The smallest sufficient deadline depends on the crossover probability.
for eps in (0.01, 0.05, 0.15):
    print(f"eps = {eps}: L_req = {deadline.l_req(Bsc(eps), grid=128)}")
