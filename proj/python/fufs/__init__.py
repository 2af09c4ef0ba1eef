"""Fu's Fs and the Stirling-number CDF S' by uniform asymptotics."""

from ._fufs import (
    Alignment,
    AlignmentSummary,
    ConvergenceError,
    DegenerateError,
    DomainError,
    FormatError,
    FsResult,
    FufsError,
    ResourceError,
    SaturationError,
    estimate,
    exact_fs,
    exact_s_prime,
    inc_beta,
    inc_beta_binomial_sum,
    mollified_error,
    parse_fasta,
    read_fasta,
    run_table1,
    solve_saddle,
    summarize,
    transition_alleles,
)

__all__ = [
    "Alignment",
    "AlignmentSummary",
    "ConvergenceError",
    "DegenerateError",
    "DomainError",
    "FormatError",
    "FsResult",
    "FufsError",
    "ResourceError",
    "SaturationError",
    "estimate",
    "exact_fs",
    "exact_s_prime",
    "inc_beta",
    "inc_beta_binomial_sum",
    "mollified_error",
    "parse_fasta",
    "read_fasta",
    "run_table1",
    "solve_saddle",
    "summarize",
    "transition_alleles",
]
