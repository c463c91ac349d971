"""Rank-one SVD updates."""

from ._svdstream import (
    Error,
    cauchy_matvec_naive,
    deflate,
    fast_matvec,
    fmm_matvec,
    fmm_order,
    jacobi_svd,
    rank_one_sym_update,
    reconstruction_error,
    solve_secular,
    update_svd,
)

__all__ = [
    "Error",
    "cauchy_matvec_naive",
    "deflate",
    "fast_matvec",
    "fmm_matvec",
    "fmm_order",
    "jacobi_svd",
    "rank_one_sym_update",
    "reconstruction_error",
    "solve_secular",
    "update_svd",
]
