#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>
#include <string>
#include <vector>

#include "fufs/errors.hpp"
#include "fufs/popgen.hpp"

using namespace fufs;

namespace {

Alignment make(std::vector<std::string> seqs) {
    Alignment aln;
    for (std::size_t i = 0; i < seqs.size(); ++i) aln.ids.push_back("s" + std::to_string(i));
    aln.seqs = std::move(seqs);
    return aln;
}

std::string format_error_message(std::string_view text) {
    try {
        parse_fasta(text);
    } catch (const FormatError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(ParseFasta, Examples) {
    const Alignment a = parse_fasta(">a\nACGT\n>b\nACGA\n");
    ASSERT_EQ(a.seqs.size(), 2u);
    EXPECT_EQ(a.seqs[0], "ACGT");
    EXPECT_EQ(a.seqs[1], "ACGA");
    EXPECT_EQ(a.ids, (std::vector<std::string>{"a", "b"}));

    const Alignment folded = parse_fasta(">a\nAC\nGT\n>b\nACGA\n");
    EXPECT_EQ(folded.seqs, a.seqs);

    EXPECT_THROW(parse_fasta(">a\nACG\n>b\nACGA\n"), FormatError);
}

TEST(ParseFasta, CarriageReturnsCaseAndHeaderTokens) {
    const Alignment a = parse_fasta(">first sample x\r\nacg\r\nt\r\n>second\r\nAC-N\r\n");
    EXPECT_EQ(a.ids, (std::vector<std::string>{"first", "second"}));
    EXPECT_EQ(a.seqs[0], "ACGT");
    EXPECT_EQ(a.seqs[1], "AC-N");
}

TEST(ParseFasta, ErrorsNameTheOffendingRecord) {
    EXPECT_NE(format_error_message(">a\nACG\n>bad\nACGA\n").find("bad"), std::string::npos);
    EXPECT_NE(format_error_message(">a\nACGT\n>odd\nACXT\n").find("odd"), std::string::npos);
    EXPECT_THROW(parse_fasta(""), FormatError);
    EXPECT_THROW(parse_fasta("\n\n"), FormatError);
    EXPECT_THROW(parse_fasta("ACGT\n>a\nACGT\n"), FormatError);
    EXPECT_THROW(parse_fasta(">a\nACGT\n"), FormatError);
    EXPECT_THROW(parse_fasta(">a\n>b\nACGT\n"), FormatError);
}

TEST(ReadFasta, FilesOnDisk) {
    const Alignment a = read_fasta(std::string(FUFS_TEST_DATA) + "/small.fa");
    EXPECT_EQ(a.seqs.size(), 5u);
    EXPECT_EQ(a.ids[0], "s1");
    EXPECT_THROW(read_fasta(std::string(FUFS_TEST_DATA) + "/unequal.fa"), FormatError);
    EXPECT_THROW(read_fasta(std::string(FUFS_TEST_DATA) + "/missing.fa"), Error);
}

TEST(PairwiseDist, Examples) {
    EXPECT_EQ(pairwise_dist("ACGTTGCA", "ACGTTGCA"), 0);
    EXPECT_EQ(pairwise_dist("ACGT", "ACGA"), 1);
    EXPECT_EQ(pairwise_dist("ANGT", "ACGA"), 1);
    EXPECT_EQ(pairwise_dist("A-GT", "TCG-"), 1);
    EXPECT_THROW(pairwise_dist("ACG", "ACGT"), DomainError);
}

TEST(Summarize, TwoIdenticalSequences) {
    for (ThetaFormula f : {ThetaFormula::Paper, ThetaFormula::Standard}) {
        const AlignmentSummary s = summarize(read_fasta(std::string(FUFS_TEST_DATA) + "/two_identical.fa"), f);
        EXPECT_EQ(s.n_seq, 2);
        EXPECT_EQ(s.m_alleles, 1);
        EXPECT_EQ(s.theta, 0.0);
        EXPECT_TRUE(s.degenerate);
    }
}

TEST(Summarize, ThreeSequencesBothFormulas) {
    // Pairwise distances {1, 1, 2}.
    const Alignment aln = make({"AAAA", "AAAC", "AACC"});
    const AlignmentSummary paper = summarize(aln, ThetaFormula::Paper);
    const AlignmentSummary standard = summarize(aln, ThetaFormula::Standard);
    EXPECT_EQ(paper.distance_sum, 4);
    EXPECT_DOUBLE_EQ(paper.theta, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(standard.theta, 4.0 / 3.0);
    EXPECT_EQ(paper.m_alleles, 3);
    EXPECT_FALSE(paper.degenerate);
}

TEST(Summarize, AllDistinct) {
    const AlignmentSummary s = summarize(make({"AAAA", "CAAA", "ACAA", "AACA", "AAAC", "GGGG"}));
    EXPECT_EQ(s.m_alleles, 6);
    EXPECT_EQ(s.merged_by_masking, 0);
}

TEST(Summarize, MaskingMergesAreCounted) {
    const AlignmentSummary s = summarize(read_fasta(std::string(FUFS_TEST_DATA) + "/small.fa"));
    EXPECT_EQ(s.n_seq, 5);
    EXPECT_EQ(s.distance_sum, 14);
    EXPECT_EQ(s.distinct_strings, 5);
    EXPECT_EQ(s.m_alleles, 4);
    EXPECT_EQ(s.merged_by_masking, 1);
    EXPECT_DOUBLE_EQ(s.theta, 28.0 / 30.0);

    // dist = 0 chains A~N and N~C into one class although A and C differ.
    const AlignmentSummary chain = summarize(make({"AA", "NA", "CA"}));
    EXPECT_EQ(chain.m_alleles, 1);
    EXPECT_EQ(chain.merged_by_masking, 2);
}

TEST(Summarize, FormulaRatioAndReorderInvariance) {
    const Alignment aln = read_fasta(std::string(FUFS_TEST_DATA) + "/small.fa");
    const AlignmentSummary paper = summarize(aln, ThetaFormula::Paper);
    const AlignmentSummary standard = summarize(aln, ThetaFormula::Standard);
    const double n = paper.n_seq;
    EXPECT_DOUBLE_EQ(paper.theta / standard.theta, (n - 1) / (n + 1));

    Alignment shuffled = aln;
    std::reverse(shuffled.seqs.begin(), shuffled.seqs.end());
    std::rotate(shuffled.seqs.begin(), shuffled.seqs.begin() + 2, shuffled.seqs.end());
    const AlignmentSummary again = summarize(shuffled, ThetaFormula::Paper);
    EXPECT_EQ(again.m_alleles, paper.m_alleles);
    EXPECT_EQ(again.distance_sum, paper.distance_sum);
    EXPECT_EQ(again.theta, paper.theta);
}

TEST(Summarize, ThetaZeroIffSingleAlleleWithoutMasking) {
    EXPECT_EQ(summarize(make({"ACGT", "ACGT", "ACGT"})).theta, 0.0);
    EXPECT_GT(summarize(make({"ACGT", "ACGT", "ACGA"})).theta, 0.0);
}

TEST(Summarize, FormulaNames) {
    EXPECT_EQ(parse_theta_formula("paper"), ThetaFormula::Paper);
    EXPECT_EQ(parse_theta_formula("standard"), ThetaFormula::Standard);
    EXPECT_EQ(to_string(ThetaFormula::Standard), "standard");
    EXPECT_THROW(parse_theta_formula("nei"), DomainError);
}

TEST(Summarize, JsonAndCsv) {
    const AlignmentSummary s = summarize(make({"AAAA", "AAAC", "AACC"}), ThetaFormula::Standard);
    const nlohmann::json j = nlohmann::json::parse(summary_json(s));
    EXPECT_EQ(j.at("n"), 3);
    EXPECT_EQ(j.at("m"), 3);
    EXPECT_DOUBLE_EQ(j.at("theta").get<double>(), 4.0 / 3.0);
    EXPECT_EQ(j.at("theta_formula"), "standard");
    EXPECT_EQ(j.at("degenerate"), false);
    EXPECT_EQ(summary_csv_header(), "n,m,theta,theta_formula,merged_by_masking,degenerate");
    EXPECT_EQ(summary_csv_row(s).rfind("3,3,", 0), 0u);
}
