#pragma once

// Input documents, report rendering and the exit-status contract of the
// command line tool.
//
// Input (UTF-8 JSON):
//
//   {"kind": "raw_matrix", "entries": [[e, e], [e, e]], "system_dimension": 2}
//   {"kind": "gkls_model", "N": 2, "H": [[e, e], [e, e]],
//    "jumps": [{"V": [[e, e], [e, e]], "rate": 1.0}]}
//
// where an entry e is [re, im], a plain real number, or an exact string such
// as "1/2-3/4i". "H" and "jumps" may be omitted; "system_dimension" (also
// accepted as "metadata": {"system_dimension": N}) tags a raw matrix as a
// superoperator on an N-dimensional system.

#include <cstddef>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "strobo/cyclicity.hpp"
#include "strobo/error.hpp"
#include "strobo/lindblad.hpp"
#include "strobo/matrix.hpp"

namespace strobo::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_internal = 1,
  exit_parse = 2,
  exit_spectral = 3,
  exit_convexity = 4,
  exit_disagreement = 5,
};

enum class InputKind { raw_matrix, gkls_model };

/// A parsed input. Payloads are held exactly and rounded to the float
/// backend on demand, so one document serves both backends.
struct InputDocument {
  InputKind kind = InputKind::raw_matrix;
  std::optional<ExactMatrix> matrix;
  std::optional<GKLSModel<GaussianRational>> model;
  std::optional<std::size_t> system_dimension;
};

namespace detail {

using json = nlohmann::json;

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline GaussianRational parse_real_number(const json& v, const std::string& where) {
  if (v.is_number_integer()) return GaussianRational(mpq_class(mpz_class(v.dump())));
  if (v.is_number()) return GaussianRational::from_double(v.get<double>());
  if (v.is_string()) {
    auto z = GaussianRational::parse(v.get<std::string>());
    if (sgn(z.imag()) != 0) throw parse_error(where + ": expected a real number");
    return z;
  }
  throw parse_error(where + ": expected a number");
}

inline GaussianRational parse_entry(const json& v, const std::string& where) {
  if (v.is_string()) {
    try {
      return GaussianRational::parse(v.get<std::string>());
    } catch (const parse_error& e) {
      throw parse_error(where + ": " + e.what());
    }
  }
  if (v.is_number()) return parse_real_number(v, where);
  if (v.is_array()) {
    if (v.size() != 2) throw parse_error(where + ": complex entry must be [re, im]");
    const auto re = parse_real_number(v[0], where);
    const auto im = parse_real_number(v[1], where);
    return GaussianRational(re.real(), im.real());
  }
  throw parse_error(where + ": expected [re, im], a number or an exact string");
}

inline ExactMatrix parse_matrix(const json& v, const std::string& name) {
  if (!v.is_array() || v.empty()) throw parse_error(name + ": expected a nonempty array of rows");
  const std::size_t n = v.size();
  ExactMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = v[i];
    if (!row.is_array()) throw parse_error(name + " row " + std::to_string(i) + ": expected an array");
    if (row.size() != n)
      throw parse_error(name + " row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                        " entries, expected " + std::to_string(n) + " (matrix must be square)");
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = parse_entry(row[j], name + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  return m;
}

inline std::size_t parse_dimension(const json& v, const std::string& name) {
  if (!v.is_number_integer() || v.get<long long>() <= 0) throw parse_error(name + ": expected a positive integer");
  return v.get<std::size_t>();
}

inline json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw parse_error("malformed document: " + std::string(e.what()), line, col);
  }
}

}  // namespace detail

inline InputDocument parse_input(std::string_view text) {
  using detail::json;
  const json doc = detail::parse_json(text);
  if (!doc.is_object()) throw parse_error("document must be a JSON object");
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw parse_error("missing \"kind\"");
  const std::string kind = doc["kind"].get<std::string>();

  InputDocument out;
  if (doc.contains("system_dimension"))
    out.system_dimension = detail::parse_dimension(doc["system_dimension"], "system_dimension");
  if (doc.contains("metadata") && doc["metadata"].is_object() && doc["metadata"].contains("system_dimension"))
    out.system_dimension = detail::parse_dimension(doc["metadata"]["system_dimension"], "metadata.system_dimension");

  if (kind == "raw_matrix") {
    out.kind = InputKind::raw_matrix;
    if (!doc.contains("entries")) throw parse_error("raw_matrix needs \"entries\"");
    out.matrix = detail::parse_matrix(doc["entries"], "entries");
  } else if (kind == "gkls_model") {
    out.kind = InputKind::gkls_model;
    if (!doc.contains("N")) throw parse_error("gkls_model needs \"N\"");
    const std::size_t n = detail::parse_dimension(doc["N"], "N");
    GKLSModel<GaussianRational> model(n);
    if (doc.contains("H")) {
      model.hamiltonian = detail::parse_matrix(doc["H"], "H");
      if (model.hamiltonian.order() != n)
        throw parse_error("H has order " + std::to_string(model.hamiltonian.order()) + ", expected N = " +
                          std::to_string(n));
    }
    if (doc.contains("jumps")) {
      const json& jumps = doc["jumps"];
      if (!jumps.is_array()) throw parse_error("\"jumps\" must be an array");
      for (std::size_t j = 0; j < jumps.size(); ++j) {
        const std::string name = "jumps[" + std::to_string(j) + "]";
        if (!jumps[j].is_object() || !jumps[j].contains("V") || !jumps[j].contains("rate"))
          throw parse_error(name + ": expected {\"V\": ..., \"rate\": ...}");
        ExactMatrix v = detail::parse_matrix(jumps[j]["V"], name + ".V");
        if (v.order() != n)
          throw parse_error(name + ".V has order " + std::to_string(v.order()) + ", expected N = " +
                            std::to_string(n));
        mpq_class rate = detail::parse_real_number(jumps[j]["rate"], name + ".rate").real();
        if (sgn(rate) <= 0) throw parse_error(name + ".rate must be positive");
        model.jumps.push_back({std::move(v), std::move(rate)});
      }
    }
    out.model = std::move(model);
    out.system_dimension = n;
  } else {
    throw parse_error("unknown kind \"" + kind + "\"");
  }
  return out;
}

/// Distinct eigenvalues for the exact backend: a JSON array of entries.
inline std::vector<GaussianRational> parse_spectrum(std::string_view text) {
  const auto doc = detail::parse_json(text);
  if (!doc.is_array()) throw parse_error("spectrum must be a JSON array");
  std::vector<GaussianRational> out;
  for (std::size_t k = 0; k < doc.size(); ++k) out.push_back(detail::parse_entry(doc[k], "spectrum[" + std::to_string(k) + "]"));
  return out;
}

inline GKLSModel<cplx> to_float(const GKLSModel<GaussianRational>& m) {
  GKLSModel<cplx> f(strobo::to_float(m.hamiltonian));
  for (const auto& j : m.jumps) f.jumps.push_back({strobo::to_float(j.op), j.rate.get_d()});
  return f;
}

// ---------------------------------------------------------------------------
// Reports

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson value_json(const cplx& z) { return ojson::array({z.real(), z.imag()}); }
inline ojson value_json(const GaussianRational& z) { return z.to_string(); }

inline std::string value_text(const cplx& z) {
  std::ostringstream os;
  os.precision(12);
  os << z.real() << (std::signbit(z.imag()) ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}
inline std::string value_text(const GaussianRational& z) { return z.to_string(); }

inline ojson decision_json(const RankDecision& d) {
  return ojson{{"rank", d.rank},
               {"scale", d.scale},
               {"threshold", d.threshold},
               {"smallest_kept", d.smallest_kept},
               {"largest_dropped", d.largest_dropped},
               {"low_confidence", d.low_confidence}};
}

}  // namespace detail

inline const char* status_name(int code) {
  switch (code) {
    case exit_ok: return "ok";
    case exit_parse: return "parse_error";
    case exit_spectral: return "spectral_error";
    case exit_convexity: return "convexity_error";
    case exit_disagreement: return "route_disagreement";
    default: return "internal_error";
  }
}

/// Exit status of a completed analysis: 0 iff the routes agree and no
/// error-level diagnostic was raised.
template <Scalar T>
int exit_status(const CyclicityReport<T>& r) {
  if (!r.agreement) return exit_disagreement;
  if (!r.diagnostics.errors.empty()) return exit_spectral;
  return exit_ok;
}

template <Scalar T>
nlohmann::ordered_json report_json(const CyclicityReport<T>& r) {
  using detail::ojson;
  ojson eig = ojson::array();
  for (const auto& e : r.eigenvalues) {
    ojson members = ojson::array();
    for (const auto& m : e.members) members.push_back(detail::value_json(m));
    ojson blocks = ojson::array();
    for (const auto& [size, count] : e.structure.block_counts) blocks.push_back(ojson{{"size", size}, {"count", count}});
    ojson decisions = ojson::array();
    for (const auto& d : e.profile.decisions) decisions.push_back(detail::decision_json(d));
    ojson item{{"value", detail::value_json(e.eigenvalue)},
               {"members", members},
               {"cluster_radius", e.cluster_radius},
               {"q", e.profile.q},
               {"stabilization_index", e.profile.stabilization_index},
               {"block_counts", blocks},
               {"geometric_multiplicity", e.structure.geometric_multiplicity},
               {"algebraic_multiplicity", e.structure.algebraic_multiplicity},
               {"kernel_dimension", e.kernel_dimension}};
    if constexpr (!scalar_traits<T>::exact) item["rank_decisions"] = decisions;
    eig.push_back(std::move(item));
  }
  ojson argmax = ojson::array();
  for (const auto& a : r.argmax) argmax.push_back(detail::value_json(a));

  const auto& d = r.diagnostics;
  ojson diag{{"rank_tol", d.rank_tol},
             {"cluster_tol", d.cluster_tol},
             {"merge_radius", d.merge_radius},
             {"max_cluster_height", d.max_cluster_height},
             {"eigen_residual", d.eigen_residual},
             {"eigen_residual_bound", d.eigen_residual_bound},
             {"low_confidence_decisions", d.low_confidence_decisions},
             {"trace_check", nullptr},
             {"warnings", d.warnings},
             {"errors", d.errors}};
  if (d.trace)
    diag["trace_check"] = ojson{{"residual", d.trace->residual}, {"tolerance", d.trace->tolerance}, {"passed", d.trace->passed}};

  const int code = exit_status(r);
  return ojson{{"status", status_name(code)},
               {"exit_code", code},
               {"backend", r.backend},
               {"order", r.order},
               {"eta_from_blocks", r.eta_from_blocks},
               {"eta_from_kernels", r.eta_from_kernels},
               {"agreement", r.agreement},
               {"argmax", argmax},
               {"static_observable_count",
                r.static_observable_count ? ojson(*r.static_observable_count) : ojson(nullptr)},
               {"eigenvalues", eig},
               {"diagnostics", diag}};
}

template <Scalar T>
std::string report_text(const CyclicityReport<T>& r) {
  std::ostringstream os;
  os << "index of cyclicity: " << r.eta_from_blocks << "\n";
  os << "  from Jordan block counts:   " << r.eta_from_blocks << "\n";
  os << "  from kernel dimensions:     " << r.eta_from_kernels << "\n";
  os << "  routes agree:               " << (r.agreement ? "yes" : "NO") << "\n";
  os << "order " << r.order << ", backend " << r.backend << ", " << r.eigenvalues.size()
     << " distinct eigenvalue(s)\n";
  if (r.static_observable_count)
    os << "static tomography would need " << *r.static_observable_count << " observables\n";
  os << "bottleneck eigenvalue(s):";
  for (const auto& a : r.argmax) os << "  " << detail::value_text(a);
  os << "\n\n";
  for (const auto& e : r.eigenvalues) {
    os << "lambda = " << detail::value_text(e.eigenvalue) << "\n";
    os << "  algebraic " << e.structure.algebraic_multiplicity << ", geometric " << e.structure.geometric_multiplicity
       << ", dim ker " << e.kernel_dimension << "\n";
    os << "  q = " << format_ranks(e.profile.q) << "\n";
    os << "  blocks:";
    for (const auto& [size, count] : e.structure.block_counts) os << " " << count << "x" << size;
    os << "\n";
  }
  for (const auto& w : r.diagnostics.warnings) os << "warning: " << w << "\n";
  for (const auto& e : r.diagnostics.errors) os << "error: " << e << "\n";
  return os.str();
}

struct RunResult {
  int exit_code = exit_ok;
  std::string output;                    // report for standard output
  std::vector<std::string> diagnostics;  // one JSON object per line for standard error
};

namespace detail {

inline std::string diagnostic_line(const char* level, int code, const std::string& message) {
  return ojson{{"level", level}, {"status", status_name(code)}, {"message", message}}.dump();
}

template <Scalar T>
RunResult render(const CyclicityReport<T>& report, const AnalysisConfig& config) {
  RunResult out;
  out.exit_code = exit_status(report);
  out.output = config.format == OutputFormat::structured ? report_json(report).dump(2) + "\n" : report_text(report);
  for (const auto& w : report.diagnostics.warnings) out.diagnostics.push_back(diagnostic_line("warning", exit_ok, w));
  for (const auto& e : report.diagnostics.errors)
    out.diagnostics.push_back(diagnostic_line("error", out.exit_code, e));
  return out;
}

inline RunResult failure(int code, const std::string& message, const AnalysisConfig& config) {
  RunResult out;
  out.exit_code = code;
  out.diagnostics.push_back(diagnostic_line("error", code, message));
  if (config.format == OutputFormat::structured)
    out.output = ojson{{"status", status_name(code)}, {"exit_code", code}, {"error", message}}.dump(2) + "\n";
  return out;
}

template <class F>
RunResult guarded(const AnalysisConfig& config, F&& body) {
  try {
    return body();
  } catch (const parse_error& e) {
    return failure(exit_parse, e.what(), config);
  } catch (const model_error& e) {
    return failure(exit_parse, e.what(), config);
  } catch (const dimension_error& e) {
    return failure(exit_parse, e.what(), config);
  } catch (const convexity_error& e) {
    return failure(exit_convexity,
                   std::string(e.what()) + "; adjust --rank-tol or rerun with --exact and a supplied spectrum",
                   config);
  } catch (const spectral_error& e) {
    return failure(exit_spectral, e.what(), config);
  } catch (const std::exception& e) {
    return failure(exit_internal, e.what(), config);
  }
}

}  // namespace detail

/// Builds the generator (for model inputs), runs the analysis on the
/// configured backend and renders the report.
inline RunResult run(const InputDocument& doc, const AnalysisConfig& config) {
  return detail::guarded(config, [&]() -> RunResult {
    AnalysisConfig cfg = config;
    if (doc.system_dimension) cfg.system_dimension = doc.system_dimension;

    if (cfg.backend == Backend::exact) {
      if (cfg.user_spectrum.empty()) throw parse_error("exact backend requires a spectrum (--spectrum)");
      const ExactMatrix l =
          doc.kind == InputKind::gkls_model ? build_superoperator(*doc.model).matrix : *doc.matrix;
      return detail::render(index_of_cyclicity(l, cfg), cfg);
    }
    const FloatMatrix l =
        doc.kind == InputKind::gkls_model ? build_superoperator(to_float(*doc.model)).matrix : to_float(*doc.matrix);
    return detail::render(index_of_cyclicity(l, cfg), cfg);
  });
}

/// parse_input followed by run, with parse failures mapped to exit status 2.
inline RunResult run_text(std::string_view input, const AnalysisConfig& config) {
  std::optional<InputDocument> doc;
  RunResult parsed = detail::guarded(config, [&] {
    doc = parse_input(input);
    return RunResult{};
  });
  if (!doc) return parsed;
  return run(*doc, config);
}

}  // namespace strobo::cli
