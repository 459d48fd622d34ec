"""
Truncated extremizers approaching the sharp constant from below
===============================================================

The operator norms computed by this package are sharp: no admissible
function does better than the closed-form constant, and the power
profiles r^{sigma_j} achieve it in the limit.  Truncating those
profiles to [r_min, r_max] gives admissible test functions whose
operator-to-norm ratio climbs toward the constant as the truncation
window widens.  This demo sweeps the window and watches the ratio
converge -- the numerical face of the sharpness argument.
"""

from hlp_sharp.cli import CSV_HEADER, emit_convergence_table
from hlp_sharp.morrey import default_grid, sharpness_ratio
from hlp_sharp.params import ParamSet
from hlp_sharp.quad import MCSpec, QuadratureSpec

# a bilinear max-kernel example on H^1 with the coupled exponents
p = ParamSet(
    m=2, n=1, q=2.0, q_list=(4.0, 4.0),
    lam=-0.25, lam_list=(-0.125, -0.125),
    gamma_list=(0.0, 0.0), alpha=0.0,
)

# one full report for a single window: the ratio is an honest quotient
# of a Monte Carlo operator norm bound and the closed-form constant
mc = MCSpec(samples=40_000, seed=1, shards=8)
rep = sharpness_ratio("hlp", p, (1e-2, 1e2), default_grid(1), QuadratureSpec(), mc)
print(rep.label)
print(f"  ratio      {rep.oracle:.6f}")
print(f"  constant   {rep.closed_form:.6f}")
print(f"  ratio/constant = {rep.oracle / rep.closed_form:.4f}  (never exceeds 1)")

# ---------------------------------------------------------------------------
# Now sweep the truncation window.  The last column is the fraction of
# the sharp constant already captured by the truncated extremizer; it
# increases monotonically toward 1 as the window widens.
# ---------------------------------------------------------------------------
widths = ((1e-1, 1e1), (1e-2, 1e2), (1e-3, 1e3))
rows = emit_convergence_table("hlp", p, widths, mc=mc)

print()
print(",".join(CSV_HEADER))
for row in rows:
    r_min, r_max, ratio, constant, frac = row
    print(f"{r_min:g},{r_max:g},{ratio:.8f},{constant:.8f},{frac:.6f}")

# the same sweep is available from the command line:
#   hlp-sharp --command verify-sharpness --m 2 --format csv \
#             --widths 1e-1:1e1,1e-2:1e2,1e-3:1e3 --out convergence.csv
