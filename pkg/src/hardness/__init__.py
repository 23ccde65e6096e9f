"""
Hardness module

The subset-sum reduction and its certificate checks.
"""

from .reduction import (
    SubsetSumInstance,
    ReducedInstance,
    CertificateReport,
    reduce_subset_sum,
    certificate_check,
    threshold_certificate_mechanism,
)
