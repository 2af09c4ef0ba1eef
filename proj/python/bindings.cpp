#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "fufs/asymptotic.hpp"
#include "fufs/bench.hpp"
#include "fufs/errors.hpp"
#include "fufs/popgen.hpp"
#include "fufs/special_functions.hpp"
#include "fufs/stirling_exact.hpp"

namespace py = pybind11;
using namespace fufs;

namespace {

int bits_or_default(int bits) { return bits > 0 ? bits : default_oracle_bits(); }

FsResult estimate_py(int n_seq, int m_alleles, double theta, bool exact_fallback, int fallback_cap) {
    EstimatorOptions options;
    options.exact_fallback = exact_fallback;
    options.fallback_cap = fallback_cap;
    return estimate({n_seq, m_alleles, theta}, options);
}

py::dict table1_row(const Table1Row& r) {
    py::dict d;
    d["n"] = r.n;
    d["m"] = r.m;
    d["theta"] = r.theta_text;
    d["fs_asymptotic"] = r.fs_asymptotic;
    d["fs_exact"] = r.fs_exact;
    d["rel_error"] = r.rel_error;
    d["printed_asymptotic"] = r.printed_asymptotic;
    d["printed_exact"] = r.printed_exact;
    d["printed_rel_error"] = r.printed_rel_error;
    d["ok"] = r.asymptotic_ok && r.exact_ok && r.rel_error_ok;
    return d;
}

}  // namespace

PYBIND11_MODULE(_fufs, m) {
    m.doc() = "Fu's Fs and the Stirling-number CDF S' by uniform asymptotics";

    auto base = py::register_exception<Error>(m, "FufsError", PyExc_RuntimeError);
    auto domain = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<DegenerateError>(m, "DegenerateError", domain.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<FormatError>(m, "FormatError", base.ptr());
    py::register_exception<ResourceError>(m, "ResourceError", base.ptr());
    py::register_exception<SaturationError>(m, "SaturationError", base.ptr());

    py::class_<FsResult>(m, "FsResult")
        .def_readonly("s_prime", &FsResult::s_prime)
        .def_readonly("t_prime", &FsResult::t_prime)
        .def_readonly("log_s_prime", &FsResult::log_s_prime)
        .def_readonly("log_t_prime", &FsResult::log_t_prime)
        .def_readonly("fs", &FsResult::fs)
        .def_readonly("correction", &FsResult::correction)
        .def_readonly("main_term", &FsResult::main_term)
        .def_readonly("saturated", &FsResult::saturated)
        .def_readonly("main_term_only", &FsResult::main_term_only)
        .def_property_readonly("method", [](const FsResult& r) { return std::string(to_string(r.method)); })
        .def_property_readonly("branch", [](const FsResult& r) { return std::string(to_string(r.branch)); })
        .def("__repr__", [](const FsResult& r) {
            return "FsResult(fs=" + std::to_string(r.fs) + ", s_prime=" + std::to_string(r.s_prime) +
                   ", method=" + std::string(to_string(r.method)) + ", branch=" + std::string(to_string(r.branch)) +
                   ")";
        });

    m.def("estimate", &estimate_py, py::arg("n"), py::arg("m"), py::arg("theta"), py::arg("exact_fallback") = true,
          py::arg("fallback_cap") = 2000, "S', T' and Fs for N sequences, M alleles and diversity theta.");

    m.def(
        "exact_fs",
        [](int n_seq, int m_alleles, const std::string& theta, int bits) {
            return exact_fs(n_seq, m_alleles, theta, bits_or_default(bits));
        },
        py::arg("n"), py::arg("m"), py::arg("theta"), py::arg("bits") = 0,
        "Fs from exact Stirling numbers; theta is decimal text.");
    m.def(
        "exact_s_prime",
        [](int n_seq, int m_alleles, const std::string& theta, int bits) {
            const ExactEvaluation ev = exact_s_prime(n_seq, m_alleles, theta, bits_or_default(bits));
            return py::make_tuple(ev.s_prime.to_double(), ev.t_prime.to_double());
        },
        py::arg("n"), py::arg("m"), py::arg("theta"), py::arg("bits") = 0, "(S', T') from exact Stirling numbers.");

    m.def("solve_saddle", &solve_saddle, py::arg("n"), py::arg("m"),
          "Saddle point z0 for shifted indices n = N - 1, m = M - 1.");
    m.def("transition_alleles", &transition_alleles, py::arg("n"), py::arg("theta"));
    m.def(
        "inc_beta", [](double p, double q, double x) { return inc_beta({p, q, x}); }, py::arg("p"), py::arg("q"),
        py::arg("x"), "Regularized incomplete beta I_x(p, q).");
    m.def("inc_beta_binomial_sum", &inc_beta_binomial_sum, py::arg("m"), py::arg("n"), py::arg("tau"));
    m.def("mollified_error", &mollified_error, py::arg("fs_ref"), py::arg("fs_est"));

    py::class_<Alignment>(m, "Alignment")
        .def_readonly("ids", &Alignment::ids)
        .def_readonly("seqs", &Alignment::seqs);
    py::class_<AlignmentSummary>(m, "AlignmentSummary")
        .def_readonly("n_seq", &AlignmentSummary::n_seq)
        .def_readonly("m_alleles", &AlignmentSummary::m_alleles)
        .def_readonly("theta", &AlignmentSummary::theta)
        .def_readonly("distance_sum", &AlignmentSummary::distance_sum)
        .def_readonly("merged_by_masking", &AlignmentSummary::merged_by_masking)
        .def_readonly("degenerate", &AlignmentSummary::degenerate)
        .def_property_readonly("theta_formula",
                               [](const AlignmentSummary& s) { return std::string(to_string(s.theta_formula)); });

    m.def(
        "parse_fasta", [](const std::string& text) { return parse_fasta(text); }, py::arg("text"));
    m.def(
        "read_fasta", [](const std::string& path) { return read_fasta(path); }, py::arg("path"));
    m.def(
        "summarize",
        [](const Alignment& aln, const std::string& formula) { return summarize(aln, parse_theta_formula(formula)); },
        py::arg("alignment"), py::arg("theta_formula") = "paper");

    m.def(
        "run_table1",
        [](int bits) {
            py::list rows;
            for (const Table1Row& r : run_table1(bits)) rows.append(table1_row(r));
            return rows;
        },
        py::arg("bits") = 0, "The seven-row reference ladder, exact values computed live.");
}
