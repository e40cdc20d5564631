"""Error exponents of ARQ schemes with a deadline constraint.

Exponents are in nats. The modules split as follows:

* :mod:`.channels` -- channel models and capacity;
* :mod:`.gallager` -- ``E_o``/``E_x`` and the random coding, sphere packing
  and expurgated exponents;
* :mod:`.erasure` -- threshold-decoding exponents ``E_1``, ``E_2`` and the
  feedback exponent ``E_F``;
* :mod:`.deadline` -- memoryless-decoding and IR-ARQ bounds for deadline
  ``L``, the optimal threshold and the minimum deadline ``L_req``;
* :mod:`.analytic` -- closed forms for the very noisy channel and the BSC
  at zero rate;
* :mod:`.simulator` -- Monte Carlo ARQ over a BSC;
* :mod:`.curves` -- exponent tables on rate grids.
"""

from .analytic import bsc_zero_rate, vnc_ef, vnc_er, vnc_esp, vnc_ir_bound
from .channels import (Awgn, Bsc, Dmc, ValidationError, Vnc, blahut_arimoto, capacity,
                       load_dmc, make_bsc, make_dmc, save_dmc, to_bits, to_nats)
from .deadline import (MdBounds, ThresholdConsistencyError, ir_lower_bound, l_req,
                       lemma1_bound, md_bounds, md_limit_check, md_lower_bound,
                       md_upper_bound, optimal_threshold)
from .erasure import e1, e2, feedback_exponent
from .gallager import (RateAboveCapacityWarning, e0_awgn, e0_gallager, e0_two_param,
                       expurgated_exponent, exponent_curve, ex_two_param, ml_exponent,
                       random_coding_exponent, sphere_packing_exponent)
from .simulator import (ArqConfig, SimulationReport, erasure_decode, estimate_exponent,
                        run_ir_arq, run_memoryless_arq, simulate)

__version__ = "0.1.0"
