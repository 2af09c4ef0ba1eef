#include "fufs/popgen.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "fufs/errors.hpp"

namespace fufs {

namespace {

bool is_base(char c) { return c == 'A' || c == 'C' || c == 'G' || c == 'T'; }

bool is_residue(char c) { return is_base(c) || c == 'N' || c == '-'; }

std::string header_id(std::string_view header) {
    std::size_t begin = 0;
    while (begin < header.size() && std::isspace(static_cast<unsigned char>(header[begin]))) ++begin;
    std::size_t end = begin;
    while (end < header.size() && !std::isspace(static_cast<unsigned char>(header[end]))) ++end;
    return std::string(header.substr(begin, end - begin));
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }
    void join(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

Alignment parse_fasta(std::string_view text) {
    Alignment aln;
    bool in_record = false;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.front() == '>') {
            std::string id = header_id(line.substr(1));
            if (id.empty()) id = "#" + std::to_string(aln.ids.size() + 1);
            aln.ids.push_back(std::move(id));
            aln.seqs.emplace_back();
            in_record = true;
            continue;
        }
        if (!in_record) {
            throw FormatError("fasta: sequence data before first header at line " +
                              std::to_string(line_no));
        }
        std::string& seq = aln.seqs.back();
        for (char c : line) {
            if (c == ' ' || c == '\t') continue;
            const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            if (!is_residue(u)) {
                throw FormatError("fasta: invalid residue '" + std::string(1, c) + "' in sequence " +
                                  aln.ids.back());
            }
            seq.push_back(u);
        }
    }
    if (aln.ids.empty()) throw FormatError("fasta: empty input");
    for (std::size_t i = 0; i < aln.seqs.size(); ++i) {
        if (aln.seqs[i].empty()) throw FormatError("fasta: empty sequence " + aln.ids[i]);
        if (aln.seqs[i].size() != aln.seqs.front().size()) {
            throw FormatError("fasta: sequence " + aln.ids[i] + " has length " +
                              std::to_string(aln.seqs[i].size()) + ", expected " +
                              std::to_string(aln.seqs.front().size()) + " (from " +
                              aln.ids.front() + ")");
        }
    }
    if (aln.seqs.size() < 2) throw FormatError("fasta: at least 2 sequences are required");
    return aln;
}

Alignment read_fasta(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("fasta: cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_fasta(buffer.str());
}

std::int64_t pairwise_dist(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) {
        throw DomainError("pairwise_dist: lengths differ (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
    }
    std::int64_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const char x = static_cast<char>(std::toupper(static_cast<unsigned char>(a[i])));
        const char y = static_cast<char>(std::toupper(static_cast<unsigned char>(b[i])));
        if (x != y && is_base(x) && is_base(y)) ++d;
    }
    return d;
}

std::string_view to_string(ThetaFormula formula) {
    return formula == ThetaFormula::Paper ? "paper" : "standard";
}

ThetaFormula parse_theta_formula(std::string_view text) {
    if (text == "paper") return ThetaFormula::Paper;
    if (text == "standard") return ThetaFormula::Standard;
    throw DomainError("theta formula must be 'paper' or 'standard', got '" + std::string(text) + "'");
}

AlignmentSummary summarize(const Alignment& aln, ThetaFormula formula) {
    const std::size_t n = aln.seqs.size();
    if (n < 2) throw DomainError("summarize: at least 2 sequences are required");
    DisjointSets classes(n);
    std::int64_t sum = 0;
    // Exact integer accumulation in (i, j) order; one division at the end.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::int64_t d = pairwise_dist(aln.seqs[i], aln.seqs[j]);
            sum += d;
            if (d == 0) classes.join(i, j);
        }
    }
    std::set<std::size_t> roots;
    for (std::size_t i = 0; i < n; ++i) roots.insert(classes.find(i));
    const std::set<std::string> distinct(aln.seqs.begin(), aln.seqs.end());

    AlignmentSummary s;
    s.n_seq = static_cast<int>(n);
    s.m_alleles = static_cast<int>(roots.size());
    s.theta_formula = formula;
    s.distance_sum = sum;
    s.distinct_strings = static_cast<int>(distinct.size());
    s.merged_by_masking = s.distinct_strings - s.m_alleles;
    s.degenerate = s.m_alleles == 1;
    const double nd = static_cast<double>(n);
    const double denom = formula == ThetaFormula::Paper ? nd * (nd + 1.0) : nd * (nd - 1.0);
    s.theta = 2.0 * static_cast<double>(sum) / denom;
    return s;
}

std::string summary_json(const AlignmentSummary& summary) {
    nlohmann::json j;
    j["n"] = summary.n_seq;
    j["m"] = summary.m_alleles;
    j["theta"] = summary.theta;
    j["theta_formula"] = std::string(to_string(summary.theta_formula));
    j["distance_sum"] = summary.distance_sum;
    j["merged_by_masking"] = summary.merged_by_masking;
    j["degenerate"] = summary.degenerate;
    return j.dump();
}

std::string summary_csv_header() { return "n,m,theta,theta_formula,merged_by_masking,degenerate"; }

std::string summary_csv_row(const AlignmentSummary& summary) {
    std::ostringstream out;
    out.precision(17);
    out << summary.n_seq << ',' << summary.m_alleles << ',' << summary.theta << ','
        << to_string(summary.theta_formula) << ',' << summary.merged_by_masking << ','
        << (summary.degenerate ? "true" : "false");
    return out.str();
}

}  // namespace fufs
