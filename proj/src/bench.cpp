#include "fufs/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>
#include <tuple>

#include "fufs/errors.hpp"
#include "fufs/stirling_exact.hpp"

namespace fufs {

double mollified_error(double fs_ref, double fs_est) {
    if (!std::isfinite(fs_ref) || !std::isfinite(fs_est)) {
        throw DomainError("mollified_error: arguments must be finite");
    }
    return std::fabs(fs_est - fs_ref) / std::max(std::fabs(fs_ref), 1.0);
}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::int64_t SplitMix64::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw DomainError("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t draw = next();
    while (draw >= limit) draw = next();
    return lo + static_cast<std::int64_t>(draw % span);
}

std::string_view to_string(SweepMethod method) {
    switch (method) {
        case SweepMethod::Asymptotic: return "asymptotic";
        case SweepMethod::Exact: return "exact";
        case SweepMethod::Recurrence: return "recurrence";
    }
    return "unknown";
}

SweepMethod parse_sweep_method(std::string_view text) {
    if (text == "asymptotic") return SweepMethod::Asymptotic;
    if (text == "exact") return SweepMethod::Exact;
    if (text == "recurrence") return SweepMethod::Recurrence;
    throw DomainError("unknown method '" + std::string(text) + "'");
}

void SweepSpec::validate() const {
    const bool ordered = theta_range.steps == 1 && !random ? theta_range.min <= theta_range.max
                                                            : theta_range.min < theta_range.max;
    if (!(theta_range.min > 0.0) || !ordered || !std::isfinite(theta_range.max)) {
        throw DomainError("sweep: theta range needs 0 < min < max (min = max for one grid point)");
    }
    if (theta_range.steps < 1) throw DomainError("sweep: theta steps must be at least 1");
    if (methods.empty()) throw DomainError("sweep: no methods selected");
    if (threads < 1) throw DomainError("sweep: threads must be at least 1");
    if (random) {
        if (random->samples < 1) throw DomainError("sweep: sample count must be positive");
        if (random->n_min < 2 || random->n_max < random->n_min) {
            throw DomainError("sweep: random n range needs 2 <= n_min <= n_max");
        }
        return;
    }
    if (n_values.empty()) throw DomainError("sweep: no n values");
    for (int n : n_values) {
        if (n < 2) throw DomainError("sweep: all n must be at least 2");
    }
    if (m_values.empty()) throw DomainError("sweep: no m values");
    for (double m : m_values) {
        if (m_rule == MRule::Fraction && !(m > 0.0 && m <= 1.0)) {
            throw DomainError("sweep: m fractions must lie in (0, 1]");
        }
        if (m_rule == MRule::Absolute && (m < 1.0 || m != std::floor(m))) {
            throw DomainError("sweep: absolute m values must be positive integers");
        }
    }
}

std::vector<ParameterTriple> SweepSpec::triples() const {
    validate();
    std::vector<ParameterTriple> out;
    if (random) {
        SplitMix64 rng(seed);
        out.reserve(static_cast<std::size_t>(random->samples));
        for (int i = 0; i < random->samples; ++i) {
            const auto n = static_cast<int>(rng.uniform_int(random->n_min, random->n_max));
            const auto m = static_cast<int>(rng.uniform_int(2, n));
            const double theta = rng.uniform(theta_range.min, theta_range.max);
            out.push_back({n, m, theta});
        }
        return out;
    }
    for (int n : n_values) {
        for (double mv : m_values) {
            int m = m_rule == MRule::Absolute ? static_cast<int>(mv)
                                              : static_cast<int>(std::lround(mv * n));
            m = std::clamp(m, 1, n);
            for (int i = 0; i < theta_range.steps; ++i) {
                const double theta =
                    theta_range.steps == 1
                        ? theta_range.min
                        : theta_range.min + (theta_range.max - theta_range.min) * i /
                                                (theta_range.steps - 1);
                out.push_back({n, m, theta});
            }
        }
    }
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

// One triple, every requested method, sharing the exact reference.
std::vector<ErrorRecord> evaluate_triple(const SweepSpec& spec, const ParameterTriple& p) {
    std::vector<ErrorRecord> out;
    const int bits = spec.oracle_bits > 0 ? spec.oracle_bits : default_oracle_bits();
    std::string ref_error;
    double fs_ref = 0.0;
    if (p.n_seq > spec.oracle_cap) {
        ref_error = "oracle cap exceeded (n > " + std::to_string(spec.oracle_cap) + ")";
    } else {
        try {
            fs_ref = exact_fs(p.n_seq, p.m_alleles, p.theta, bits);
        } catch (const Error& e) {
            ref_error = e.what();
        }
    }
    for (SweepMethod method : spec.methods) {
        ErrorRecord rec;
        rec.params = p;
        rec.method = method;
        if (!ref_error.empty()) {
            rec.error = ref_error;
            out.push_back(std::move(rec));
            continue;
        }
        try {
            const auto start = Clock::now();
            switch (method) {
                case SweepMethod::Asymptotic: {
                    const FsResult r = estimate(p, spec.estimator);
                    rec.fs_est = r.fs;
                    rec.branch = std::string(to_string(r.branch));
                    if (r.method != Method::Asymptotic) {
                        rec.branch += "/" + std::string(to_string(r.method));
                    }
                    break;
                }
                case SweepMethod::Exact:
                    rec.fs_est = fs_ref;
                    rec.branch = "exact";
                    break;
                case SweepMethod::Recurrence:
                    rec.fs_est = recurrence_s_prime(p.n_seq, p.m_alleles, p.theta).fs;
                    rec.branch = "recurrence";
                    break;
            }
            if (spec.timing) rec.wall_time_ns = elapsed_ns(start);
            rec.fs_ref = fs_ref;
            rec.mollified = mollified_error(fs_ref, rec.fs_est);
        } catch (const Error& e) {
            rec.error = e.what();
        }
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace

std::vector<ErrorRecord> run_sweep(const SweepSpec& spec) {
    const std::vector<ParameterTriple> params = spec.triples();
    std::vector<std::vector<ErrorRecord>> slots(params.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < params.size(); i = next++) {
            slots[i] = evaluate_triple(spec, params[i]);
        }
    };
    const int threads = std::min<int>(spec.threads, static_cast<int>(params.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    std::vector<ErrorRecord> records;
    for (auto& slot : slots) {
        for (auto& rec : slot) records.push_back(std::move(rec));
    }
    std::stable_sort(records.begin(), records.end(), [](const ErrorRecord& a, const ErrorRecord& b) {
        return std::tuple(a.params.n_seq, a.params.m_alleles, a.params.theta, a.method) <
               std::tuple(b.params.n_seq, b.params.m_alleles, b.params.theta, b.method);
    });
    return records;
}

namespace {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepSpec& spec,
                     const std::vector<ErrorRecord>& records) {
    out << "# generator=splitmix64 seed=" << spec.seed << '\n';
    out << "n,m,theta,method,branch,fs,ref_fs,mollified,wall_time_ns\n";
    for (const ErrorRecord& r : records) {
        if (!r.error.empty()) {
            out << "# error n=" << r.params.n_seq << " m=" << r.params.m_alleles
                << " theta=" << format_double(r.params.theta) << " method=" << to_string(r.method)
                << ": " << r.error << '\n';
            continue;
        }
        out << r.params.n_seq << ',' << r.params.m_alleles << ',' << format_double(r.params.theta)
            << ',' << to_string(r.method) << ',' << r.branch << ',' << format_double(r.fs_est)
            << ',' << format_double(r.fs_ref) << ',' << format_double(r.mollified) << ','
            << r.wall_time_ns << '\n';
    }
}

std::vector<Table1Row> table1_reference() {
    auto row = [](int n, int m, const char* theta, double asym, double exact, int decimals,
                  double rel) {
        Table1Row r;
        r.n = n;
        r.m = m;
        r.theta_text = theta;
        r.printed_asymptotic = asym;
        r.printed_exact = exact;
        r.printed_exact_decimals = decimals;
        r.printed_rel_error = rel;
        return r;
    };
    return {
        row(25, 20, "9.39", -6.83168, -6.8294578, 7, 0.33e-3),
        row(50, 31, "9.61", -10.13052, -10.1290263, 7, 0.15e-3),
        row(100, 40, "9.37", -10.23064, -10.2298131, 7, 0.81e-4),
        row(250, 67, "8.96", -26.41607, -26.4155959, 7, 0.18e-4),
        row(500, 95, "9.04", -46.76268, -46.76238956, 8, 0.63e-5),
        row(1000, 152, "9.07", -112.42500, -112.4248080, 7, 0.17e-5),
        row(2001, 213, "9.03", -192.21835, -192.2182390, 7, 0.60e-6),
    };
}

std::vector<Table1Row> run_table1(int oracle_bits) {
    const int bits = oracle_bits > 0 ? oracle_bits : default_oracle_bits();
    std::vector<Table1Row> rows = table1_reference();
    for (Table1Row& r : rows) {
        const auto start = Clock::now();
        const double theta = std::stod(r.theta_text);
        r.fs_asymptotic = estimate({r.n, r.m, theta}).fs;
        r.fs_exact = exact_fs(r.n, r.m, r.theta_text, bits);
        r.seconds = static_cast<double>(elapsed_ns(start)) * 1e-9;
        r.rel_error = std::fabs(r.fs_asymptotic - r.fs_exact) / std::fabs(r.fs_exact);
        // Half a unit in the fifth significant digit of the printed value.
        const double unit5 =
            std::pow(10.0, std::floor(std::log10(std::fabs(r.printed_asymptotic))) - 4.0);
        r.asymptotic_ok = std::fabs(r.fs_asymptotic - r.printed_asymptotic) <= 0.5 * unit5;
        r.exact_ok = std::fabs(r.fs_exact - r.printed_exact) <= std::pow(10.0, -r.printed_exact_decimals);
        r.rel_error_ok =
            r.rel_error <= 3.0 * r.printed_rel_error && r.rel_error >= r.printed_rel_error / 3.0;
    }
    return rows;
}

void write_table1(std::ostream& out, const std::vector<Table1Row>& rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%-9s %6s %14s %16s %10s %10s  %s\n", "n/m", "theta",
                  "Fs asymptotic", "Fs exact", "rel.error", "printed", "status");
    out << line;
    for (const Table1Row& r : rows) {
        const bool pass = r.asymptotic_ok && r.exact_ok && r.rel_error_ok;
        const std::string nm = std::to_string(r.n) + "/" + std::to_string(r.m);
        std::snprintf(line, sizeof line, "%-9s %6s %14.6f %16.9f %10.2e %10.2e  %s\n", nm.c_str(),
                      r.theta_text.c_str(), r.fs_asymptotic, r.fs_exact, r.rel_error,
                      r.printed_rel_error, pass ? "PASS" : "FAIL");
        out << line;
    }
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

volatile double g_sink = 0.0;

}  // namespace

BenchReport run_bench(const SweepSpec& spec, int iterations) {
    if (iterations < 1) throw DomainError("bench: iterations must be at least 1");
    EstimatorOptions options = spec.estimator;
    options.exact_fallback = false;
    BenchReport report;
    report.iterations = iterations;
    for (const ParameterTriple& p : spec.triples()) {
        std::vector<double> asym;
        std::vector<double> rec;
        for (int it = 0; it < iterations; ++it) {
            auto time_asym = [&] {
                const auto start = Clock::now();
                g_sink = estimate(p, options).fs;
                asym.push_back(static_cast<double>(elapsed_ns(start)));
            };
            auto time_rec = [&] {
                const auto start = Clock::now();
                g_sink = recurrence_s_prime(p.n_seq, p.m_alleles, p.theta).fs;
                rec.push_back(static_cast<double>(elapsed_ns(start)));
            };
            if (it % 2 == 0) {
                time_asym();
                time_rec();
            } else {
                time_rec();
                time_asym();
            }
        }
        report.entries.push_back({p, median(asym), median(rec)});
    }
    return report;
}

double median_estimate_ns(const ParameterTriple& params, int iterations,
                          const EstimatorOptions& options) {
    if (iterations < 1) throw DomainError("bench: iterations must be at least 1");
    constexpr int kBatch = 16;
    std::vector<double> samples;
    for (int it = 0; it < iterations; ++it) {
        const auto start = Clock::now();
        for (int b = 0; b < kBatch; ++b) g_sink = estimate(params, options).fs;
        samples.push_back(static_cast<double>(elapsed_ns(start)) / kBatch);
    }
    return median(std::move(samples));
}

void write_bench_csv(std::ostream& out, const BenchReport& report) {
    out << "# iterations=" << report.iterations << " order=alternating clock=steady\n";
    out << "n,m,theta,asymptotic_median_ns,recurrence_median_ns,speedup\n";
    for (const BenchEntry& e : report.entries) {
        out << e.params.n_seq << ',' << e.params.m_alleles << ',' << format_double(e.params.theta)
            << ',' << format_double(e.asymptotic_median_ns) << ','
            << format_double(e.recurrence_median_ns) << ',' << format_double(e.speedup()) << '\n';
    }
}

}  // namespace fufs
