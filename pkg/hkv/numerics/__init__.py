"""补偿求和、筛法与尾项上界。 / Compensated sums, sieves and tail certificates."""

from hkv.numerics.powers import complex_power
from hkv.numerics.sieve import dirichlet_convolve, divisor_table
from hkv.numerics.summation import ArrayAccumulator, ComplexAccumulator, cdot, csum, csum_rows, rsum
from hkv.numerics.tails import dn_tail, dn_tail_exact, dn_tail_majorant, weighted_tail_bound

__all__ = [
    "ArrayAccumulator",
    "ComplexAccumulator",
    "cdot",
    "complex_power",
    "csum",
    "csum_rows",
    "dirichlet_convolve",
    "divisor_table",
    "dn_tail",
    "dn_tail_exact",
    "dn_tail_majorant",
    "rsum",
    "weighted_tail_bound",
]
