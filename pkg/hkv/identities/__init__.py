"""有限恒等式校验套件。 / Finite identity verification suite."""

from hkv.identities.suite import (
    IdentityId,
    primitive_even_sum,
    run_suite,
    verify_gauss_twist,
    verify_hK2,
    verify_hK2_hKsum,
    verify_hKsum,
    verify_lcAC,
    verify_QO,
    verify_SOGS,
)

__all__ = [
    "IdentityId",
    "primitive_even_sum",
    "run_suite",
    "verify_QO",
    "verify_SOGS",
    "verify_gauss_twist",
    "verify_hK2",
    "verify_hK2_hKsum",
    "verify_hKsum",
    "verify_lcAC",
]
