#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fufs {

// Alignment front-end: n sequences, m distinct alleles and the average
// pairwise difference theta_pi.

struct Alignment {
    std::vector<std::string> ids;
    std::vector<std::string> seqs;  // uppercased, equal lengths
};

/// Parses FASTA text (CR/LF tolerated, folded sequence lines joined). Allowed
/// residues are A, C, G, T, N and '-' in either case. Throws FormatError for
/// empty input, fewer than 2 sequences, bad residues or unequal lengths.
Alignment parse_fasta(std::string_view text);
Alignment read_fasta(const std::filesystem::path& path);

/// Sites where both residues are in {A,C,G,T} and differ. Throws DomainError
/// on unequal lengths.
std::int64_t pairwise_dist(std::string_view a, std::string_view b);

/// Normalisation of the pairwise sum: PAPER uses 2/(n(n+1)), STANDARD the
/// conventional 2/(n(n-1)).
enum class ThetaFormula { Paper, Standard };

std::string_view to_string(ThetaFormula formula);
/// Accepts "paper" or "standard"; throws DomainError otherwise.
ThetaFormula parse_theta_formula(std::string_view text);

struct AlignmentSummary {
    int n_seq = 0;
    int m_alleles = 0;
    double theta = 0.0;
    ThetaFormula theta_formula = ThetaFormula::Paper;
    std::int64_t distance_sum = 0;  // sum over i < j of dist(D_i, D_j)
    int distinct_strings = 0;       // distinct sequences before dist = 0 classing
    int merged_by_masking = 0;      // distinct_strings - m_alleles
    bool degenerate = false;        // m_alleles == 1: Fs undefined
};

/// Alleles are the connected classes of the relation dist = 0, so masked
/// sites can merge strings that are not identical; such merges are counted.
AlignmentSummary summarize(const Alignment& aln, ThetaFormula formula = ThetaFormula::Paper);

std::string summary_json(const AlignmentSummary& summary);
std::string summary_csv_header();
std::string summary_csv_row(const AlignmentSummary& summary);

}  // namespace fufs
