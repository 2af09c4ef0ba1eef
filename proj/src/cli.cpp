#include "fufs/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "fufs/asymptotic.hpp"
#include "fufs/bench.hpp"
#include "fufs/errors.hpp"
#include "fufs/popgen.hpp"
#include "fufs/stirling_exact.hpp"

namespace fufs {

namespace {

struct ComputeOutput {
    int n = 0;
    int m = 0;
    double theta = 0.0;
    double s_prime = 0.0;
    double t_prime = 0.0;
    double fs = 0.0;
    std::string method;
    std::string branch;
    double correction = 0.0;
    bool saturated = false;
    bool main_term_only = false;
};

ComputeOutput compute(int n, int m, const std::string& theta_text, const std::string& method,
                      int oracle_bits) {
    const double theta = std::stod(theta_text);
    ComputeOutput o;
    o.n = n;
    o.m = m;
    o.theta = theta;
    if (method == "exact") {
        validate(ParameterTriple{n, m, theta});
        if (m == 1) throw DegenerateError("degenerate: single allele (M = 1 gives S' = 1)");
        const int bits = oracle_bits > 0 ? oracle_bits : default_oracle_bits();
        const ExactEvaluation ev = exact_s_prime(n, m, theta_text, bits);
        o.s_prime = ev.s_prime.to_double();
        o.t_prime = ev.t_prime.to_double();
        o.fs = exact_fs(n, m, theta_text, bits);
        o.method = "exact";
        o.branch = "none";
        return o;
    }
    EstimatorOptions options;
    options.exact_fallback = method == "auto";
    options.oracle_bits = oracle_bits;
    const FsResult r = estimate({n, m, theta}, options);
    o.s_prime = r.s_prime;
    o.t_prime = r.t_prime;
    o.fs = r.fs;
    o.method = std::string(to_string(r.method));
    o.branch = std::string(to_string(r.branch));
    o.correction = r.correction;
    o.saturated = r.saturated;
    o.main_term_only = r.main_term_only;
    return o;
}

nlohmann::json to_json(const ComputeOutput& o) {
    nlohmann::json j;
    j["n"] = o.n;
    j["m"] = o.m;
    j["theta"] = o.theta;
    j["s_prime"] = o.s_prime;
    j["t_prime"] = o.t_prime;
    // JSON has no infinities; a saturated Fs is reported as null with the flag set.
    j["fs"] = std::isfinite(o.fs) ? nlohmann::json(o.fs) : nlohmann::json(nullptr);
    j["method"] = o.method;
    j["branch"] = o.branch;
    j["correction"] = o.correction;
    j["saturated"] = o.saturated;
    j["main_term_only"] = o.main_term_only;
    return j;
}

void print_text(std::ostream& out, const ComputeOutput& o) {
    char line[128];
    std::snprintf(line, sizeof line, "n=%d m=%d theta=%.17g\n", o.n, o.m, o.theta);
    out << line;
    std::snprintf(line, sizeof line, "S'=%.17g\nT'=%.17g\nFs=%.10f\n", o.s_prime, o.t_prime, o.fs);
    out << line;
    std::snprintf(line, sizeof line, "method=%s branch=%s correction=%.6e%s%s\n", o.method.c_str(),
                  o.branch.c_str(), o.correction, o.saturated ? " saturated" : "",
                  o.main_term_only ? " main_term_only" : "");
    out << line;
}

void add_grid_options(CLI::App* cmd, SweepSpec& spec, std::vector<double>& m_abs,
                      std::vector<double>& m_frac) {
    cmd->add_option("--n", spec.n_values, "Sequence counts N")->delimiter(',');
    auto* abs = cmd->add_option("--m", m_abs, "Allele counts M")->delimiter(',');
    auto* frac = cmd->add_option("--m-frac", m_frac, "Allele fractions M/N in (0, 1]")->delimiter(',');
    abs->excludes(frac);
    cmd->add_option("--theta-min", spec.theta_range.min, "Smallest theta")->capture_default_str();
    cmd->add_option("--theta-max", spec.theta_range.max, "Largest theta")->capture_default_str();
    cmd->add_option("--theta-steps", spec.theta_range.steps, "Grid points in theta")
        ->capture_default_str();
}

void finish_grid(SweepSpec& spec, const std::vector<double>& m_abs, const std::vector<double>& m_frac) {
    if (!m_frac.empty()) {
        spec.m_rule = MRule::Fraction;
        spec.m_values = m_frac;
    } else {
        spec.m_rule = MRule::Absolute;
        spec.m_values = m_abs;
    }
}

std::ofstream open_output(const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw DomainError("cannot open output file " + path);
    return file;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fu's Fs and the Stirling-number distribution S' via a single-shot estimator",
                 "fufs"};
    app.require_subcommand(1);

    // compute
    auto* cmd_compute = app.add_subcommand("compute", "Evaluate S', T' and Fs for one triple");
    int c_n = 0;
    int c_m = 0;
    std::string c_theta;
    std::string c_method = "auto";
    bool c_json = false;
    int oracle_bits = 0;
    cmd_compute->add_option("--n", c_n, "Number of sequences N")->required();
    cmd_compute->add_option("--m", c_m, "Number of distinct alleles M")->required();
    cmd_compute->add_option("--theta", c_theta, "Nucleotide diversity theta (decimal)")->required();
    cmd_compute->add_option("--method", c_method, "auto, asymptotic or exact")
        ->check(CLI::IsMember({"auto", "asymptotic", "exact"}))
        ->capture_default_str();
    cmd_compute->add_flag("--json", c_json, "Emit JSON");
    cmd_compute->add_option("--oracle-bits", oracle_bits, "Oracle precision in bits");

    // fasta
    auto* cmd_fasta = app.add_subcommand("fasta", "Summarise an alignment and evaluate Fs");
    std::string f_path;
    std::string f_formula = "paper";
    bool f_json = false;
    bool f_csv = false;
    cmd_fasta->add_option("path", f_path, "FASTA file")->required();
    cmd_fasta->add_option("--theta-formula", f_formula, "paper: 2/(n(n+1)); standard: 2/(n(n-1))")
        ->check(CLI::IsMember({"paper", "standard"}))
        ->capture_default_str();
    cmd_fasta->add_flag("--json", f_json, "Emit JSON");
    cmd_fasta->add_flag("--csv", f_csv, "Emit the summary as a CSV row");

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "Error sweep against the exact oracle");
    SweepSpec s_spec;
    std::vector<double> s_m_abs;
    std::vector<double> s_m_frac;
    std::vector<std::string> s_methods = {"asymptotic"};
    int s_random = 0;
    int s_n_min = 50;
    int s_n_max = 500;
    std::string s_out;
    add_grid_options(cmd_sweep, s_spec, s_m_abs, s_m_frac);
    cmd_sweep->add_option("--random", s_random, "Draw this many random triples instead of a grid");
    cmd_sweep->add_option("--n-min", s_n_min, "Random sweeps: smallest N")->capture_default_str();
    cmd_sweep->add_option("--n-max", s_n_max, "Random sweeps: largest N")->capture_default_str();
    cmd_sweep->add_option("--seed", s_spec.seed, "SplitMix64 seed")->capture_default_str();
    cmd_sweep->add_option("--methods", s_methods, "asymptotic, exact, recurrence")
        ->delimiter(',')
        ->check(CLI::IsMember({"asymptotic", "exact", "recurrence"}));
    cmd_sweep->add_option("--threads", s_spec.threads, "Worker threads")->capture_default_str();
    cmd_sweep->add_flag("--timing", s_spec.timing, "Record wall_time_ns (output no longer reproducible)");
    cmd_sweep->add_option("--oracle-bits", oracle_bits, "Oracle precision in bits");
    cmd_sweep->add_option("--out", s_out, "CSV output file (default: stdout)");

    // bench
    auto* cmd_bench = app.add_subcommand("bench", "Time the estimator against the recurrence");
    SweepSpec b_spec;
    std::vector<double> b_m_abs;
    std::vector<double> b_m_frac;
    int b_iterations = 30;
    std::string b_out;
    add_grid_options(cmd_bench, b_spec, b_m_abs, b_m_frac);
    cmd_bench->add_option("--iterations", b_iterations, "Timed iterations per triple")
        ->capture_default_str();
    cmd_bench->add_option("--out", b_out, "CSV output file (default: stdout)");

    // table1
    auto* cmd_table1 = app.add_subcommand("table1", "Reference ladder of seven triples");
    cmd_table1->add_option("--oracle-bits", oracle_bits, "Oracle precision in bits");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*cmd_compute) {
            const ComputeOutput o = compute(c_n, c_m, c_theta, c_method, oracle_bits);
            if (c_json) {
                out << to_json(o).dump() << '\n';
            } else {
                print_text(out, o);
            }
            return kExitOk;
        }
        if (*cmd_fasta) {
            const Alignment aln = read_fasta(f_path);
            const AlignmentSummary s = summarize(aln, parse_theta_formula(f_formula));
            if (f_csv) {
                out << summary_csv_header() << '\n' << summary_csv_row(s) << '\n';
                return kExitOk;
            }
            std::optional<ComputeOutput> o;
            if (!s.degenerate) {
                char text[64];
                std::snprintf(text, sizeof text, "%.17g", s.theta);
                o = compute(s.n_seq, s.m_alleles, text, "auto", oracle_bits);
            }
            if (f_json) {
                nlohmann::json j = o ? to_json(*o) : nlohmann::json::object();
                j["n"] = s.n_seq;
                j["m"] = s.m_alleles;
                j["theta"] = s.theta;
                j["theta_formula"] = std::string(to_string(s.theta_formula));
                j["merged_by_masking"] = s.merged_by_masking;
                j["degenerate"] = s.degenerate;
                if (!o) {
                    for (const char* key : {"s_prime", "t_prime", "fs", "method", "branch", "correction"}) {
                        j[key] = nullptr;
                    }
                }
                out << j.dump() << '\n';
                return kExitOk;
            }
            char line[160];
            std::snprintf(line, sizeof line, "n=%d m=%d theta=%.17g theta_formula=%s\n", s.n_seq,
                          s.m_alleles, s.theta, std::string(to_string(s.theta_formula)).c_str());
            out << line;
            if (s.merged_by_masking > 0) {
                out << "note: " << s.merged_by_masking
                    << " distinct sequence(s) merged by masked sites\n";
            }
            if (s.degenerate) {
                out << "degenerate: single allele (m = 1), Fs is undefined\n";
            } else {
                print_text(out, *o);
            }
            return kExitOk;
        }
        if (*cmd_sweep) {
            finish_grid(s_spec, s_m_abs, s_m_frac);
            if (s_random > 0) s_spec.random = RandomSampling{s_random, s_n_min, s_n_max};
            s_spec.methods.clear();
            for (const auto& name : s_methods) s_spec.methods.push_back(parse_sweep_method(name));
            s_spec.oracle_bits = oracle_bits;
            const auto records = run_sweep(s_spec);
            if (s_out.empty()) {
                write_sweep_csv(out, s_spec, records);
            } else {
                auto file = open_output(s_out);
                write_sweep_csv(file, s_spec, records);
                std::size_t ok = 0;
                std::size_t below = 0;
                for (const auto& r : records) {
                    if (!r.error.empty()) continue;
                    ++ok;
                    if (r.mollified < 1e-3) ++below;
                }
                out << records.size() << " records (" << records.size() - ok << " errors), "
                    << below << " with mollified error < 1e-3; written to " << s_out << '\n';
            }
            return kExitOk;
        }
        if (*cmd_bench) {
            finish_grid(b_spec, b_m_abs, b_m_frac);
            const BenchReport report = run_bench(b_spec, b_iterations);
            if (b_out.empty()) {
                write_bench_csv(out, report);
            } else {
                auto file = open_output(b_out);
                write_bench_csv(file, report);
                for (const auto& e : report.entries) {
                    char line[160];
                    std::snprintf(line, sizeof line,
                                  "n=%d m=%d theta=%g asymptotic=%.0fns recurrence=%.0fns x%.1f\n",
                                  e.params.n_seq, e.params.m_alleles, e.params.theta,
                                  e.asymptotic_median_ns, e.recurrence_median_ns, e.speedup());
                    out << line;
                }
            }
            return kExitOk;
        }
        if (*cmd_table1) {
            const auto rows = run_table1(oracle_bits);
            write_table1(out, rows);
            for (const auto& r : rows) {
                if (!(r.asymptotic_ok && r.exact_ok && r.rel_error_ok)) return kExitFailed;
            }
            return kExitOk;
        }
    } catch (const ConvergenceError& e) {
        err << "convergence error: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const DegenerateError& e) {
        err << e.what() << '\n';
        return kExitDomain;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::invalid_argument& e) {
        err << "error: invalid number (" << e.what() << ")\n";
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        err << "error: number out of range (" << e.what() << ")\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "unexpected error: " << e.what() << '\n';
        return kExitFailed;
    }
    return kExitUsage;
}

}  // namespace fufs
