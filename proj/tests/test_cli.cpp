#include <gtest/gtest.h>

#include "strobo/cli.hpp"
#include "support.hpp"

using namespace strobo;
using namespace strobo::testing;
using nlohmann::json;

namespace {

using Q = GaussianRational;

const char* dephasing = R"({
  "kind": "gkls_model",
  "N": 2,
  "H": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]],
  "jumps": [{"V": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]], "rate": 1.0}]
})";

const char* identity4 = R"({"kind": "raw_matrix", "entries": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]})";

// J2(0) + J1(0).
const char* nilpotent = R"({"kind": "raw_matrix", "entries": [[0,1,0],[0,0,0],[0,0,0]]})";

AnalysisConfig structured() {
  AnalysisConfig c;
  c.format = OutputFormat::structured;
  return c;
}

json run_json(const char* input, const AnalysisConfig& cfg = structured()) {
  return json::parse(cli::run_text(input, cfg).output);
}

}  // namespace

TEST(ParseInput, RawMatrix) {
  const auto doc = cli::parse_input(identity4);
  EXPECT_EQ(doc.kind, cli::InputKind::raw_matrix);
  ASSERT_TRUE(doc.matrix);
  EXPECT_EQ(*doc.matrix, ExactMatrix::identity(4));
  EXPECT_FALSE(doc.system_dimension);
}

TEST(ParseInput, EntryForms) {
  const auto doc = cli::parse_input(R"({"kind": "raw_matrix", "entries": [[[1, 2], "1/3-i"], [0.5, "-2"]],
                                        "metadata": {"system_dimension": 7}})");
  const ExactMatrix& m = *doc.matrix;
  EXPECT_EQ(m(0, 0), Q(mpq_class(1), mpq_class(2)));
  EXPECT_EQ(m(0, 1), Q(mpq_class(1, 3), mpq_class(-1)));
  EXPECT_EQ(m(1, 0), Q(mpq_class(1, 2), mpq_class(0)));
  EXPECT_EQ(m(1, 1), Q(-2));
  EXPECT_EQ(doc.system_dimension, 7u);
}

TEST(ParseInput, DephasingModelBuildsDiagonalSuperoperator) {
  const auto doc = cli::parse_input(dephasing);
  EXPECT_EQ(doc.kind, cli::InputKind::gkls_model);
  EXPECT_EQ(doc.system_dimension, 2u);
  EXPECT_EQ(build_superoperator(*doc.model).matrix, ExactMatrix::diagonal({Q(0), Q(-2), Q(-2), Q(0)}));
  EXPECT_EQ(build_superoperator(cli::to_float(*doc.model)).matrix, FloatMatrix::diagonal({0.0, -2.0, -2.0, 0.0}));
}

TEST(ParseInput, RaggedRowNamesTheRow) {
  try {
    cli::parse_input(R"({"kind": "raw_matrix", "entries": [[1, 0], [0]]})");
    FAIL();
  } catch (const parse_error& e) {
    EXPECT_NE(std::string(e.what()).find("row 1 has 1 entries, expected 2"), std::string::npos) << e.what();
  }
}

TEST(ParseInput, Rejections) {
  EXPECT_THROW(cli::parse_input(R"({"kind": "tensor"})"), parse_error);
  EXPECT_THROW(cli::parse_input(R"({"entries": [[1]]})"), parse_error);
  EXPECT_THROW(cli::parse_input(R"([1, 2])"), parse_error);
  EXPECT_THROW(cli::parse_input(R"({"kind": "gkls_model"})"), parse_error);
  EXPECT_THROW(cli::parse_input(R"({"kind": "gkls_model", "N": 2, "jumps": [{"V": [[1,0],[0,1]], "rate": 0}]})"),
               parse_error);
  EXPECT_THROW(cli::parse_input(R"({"kind": "gkls_model", "N": 2, "H": [[1]]})"), parse_error);
  EXPECT_THROW(cli::parse_input(R"({"kind": "raw_matrix", "entries": [["1+"]]})"), parse_error);
  EXPECT_THROW(cli::parse_input(R"({"kind": "raw_matrix", "entries": [[[1, 2, 3]]]})"), parse_error);
}

TEST(ParseInput, MalformedJsonReportsLineAndColumn) {
  try {
    cli::parse_input("{\n  \"kind\": \"raw_matrix\",\n  \"entries\": [[1, 2],, [3, 4]]\n}");
    FAIL();
  } catch (const parse_error& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 1u);
  }
}

TEST(ParseSpectrum, Forms) {
  EXPECT_EQ(cli::parse_spectrum(R"(["1/2", [0, 1], 3])"), (std::vector<Q>{Q(mpq_class(1, 2), mpq_class(0)), Q::i(), Q(3)}));
  EXPECT_THROW(cli::parse_spectrum(R"({"a": 1})"), parse_error);
}

TEST(Run, IdentityHasFullDegeneracy) {
  const auto r = cli::run_text(identity4, structured());
  EXPECT_EQ(r.exit_code, 0);
  const json j = json::parse(r.output);
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["eta_from_blocks"], 4);
  EXPECT_EQ(j["eta_from_kernels"], 4);
  EXPECT_EQ(j["agreement"], true);
  EXPECT_TRUE(j["static_observable_count"].is_null());
}

TEST(Run, Dephasing) {
  const auto r = cli::run_text(dephasing, structured());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.diagnostics.empty());
  const json j = json::parse(r.output);
  EXPECT_EQ(j["eta_from_blocks"], 2);
  EXPECT_EQ(j["static_observable_count"], 3);
  EXPECT_EQ(j["argmax"].size(), 2u);
  EXPECT_EQ(j["diagnostics"]["trace_check"]["passed"], true);
}

TEST(Run, NilpotentMixedBlocks) {
  const json j = run_json(nilpotent);
  EXPECT_EQ(j["eta_from_blocks"], 2);
  ASSERT_EQ(j["argmax"].size(), 1u);
  EXPECT_NEAR(j["argmax"][0][0].get<double>(), 0.0, 1e-14);
  ASSERT_EQ(j["eigenvalues"].size(), 1u);
  EXPECT_EQ(j["eigenvalues"][0]["q"], json::parse("[3, 1, 0, 0]"));
  EXPECT_EQ(j["eigenvalues"][0]["block_counts"], json::parse(R"([{"size": 1, "count": 1}, {"size": 2, "count": 1}])"));
}

TEST(Run, ExactBackend) {
  AnalysisConfig cfg = structured();
  cfg.backend = Backend::exact;
  cfg.user_spectrum = {Q(0)};
  const auto r = cli::run_text(nilpotent, cfg);
  EXPECT_EQ(r.exit_code, 0);
  const json j = json::parse(r.output);
  EXPECT_EQ(j["backend"], "exact");
  EXPECT_EQ(j["eigenvalues"][0]["value"], "0");
  EXPECT_EQ(j["eta_from_blocks"], 2);
  EXPECT_FALSE(j["eigenvalues"][0].contains("rank_decisions"));
}

TEST(Run, ExactWithoutSpectrumIsAUsageError) {
  AnalysisConfig cfg;
  cfg.backend = Backend::exact;
  EXPECT_EQ(cli::run_text(nilpotent, cfg).exit_code, cli::exit_parse);
}

TEST(Run, ExitCodes) {
  EXPECT_EQ(cli::run_text("{", structured()).exit_code, cli::exit_parse);
  EXPECT_EQ(cli::run_text(R"({"kind": "raw_matrix", "entries": [[1, 0], [0]]})", structured()).exit_code,
            cli::exit_parse);
  // Non-Hermitian Hamiltonian.
  EXPECT_EQ(cli::run_text(R"({"kind": "gkls_model", "N": 2, "H": [[0, 1], [0, 0]]})", structured()).exit_code,
            cli::exit_parse);

  AnalysisConfig incomplete = structured();
  incomplete.backend = Backend::exact;
  incomplete.user_spectrum = {Q(5)};
  const auto r = cli::run_text(nilpotent, incomplete);
  EXPECT_EQ(r.exit_code, cli::exit_spectral);
  EXPECT_EQ(json::parse(r.output)["status"], "spectral_error");

  const auto convexity = cli::detail::guarded(structured(), []() -> cli::RunResult {
    throw convexity_error("rank sequence not convex", 1, {4, 3, 1, 1});
  });
  EXPECT_EQ(convexity.exit_code, cli::exit_convexity);
  EXPECT_EQ(json::parse(convexity.output)["status"], "convexity_error");
  ASSERT_EQ(convexity.diagnostics.size(), 1u);
  EXPECT_EQ(json::parse(convexity.diagnostics[0])["level"], "error");

  CyclicityReport<cplx> split;
  split.agreement = false;
  EXPECT_EQ(cli::exit_status(split), cli::exit_disagreement);
  CyclicityReport<cplx> flagged;
  flagged.agreement = true;
  flagged.diagnostics.errors.push_back("x");
  EXPECT_EQ(cli::exit_status(flagged), cli::exit_spectral);
}

TEST(Run, StructuredOutputIsDeterministic) {
  Rng rng(61);
  const auto model = random_model(rng, 3, 2);
  json doc{{"kind", "raw_matrix"}};
  const auto s = build_superoperator(model).matrix;
  json rows = json::array();
  for (std::size_t i = 0; i < s.order(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < s.order(); ++j) row.push_back({s(i, j).real(), s(i, j).imag()});
    rows.push_back(row);
  }
  doc["entries"] = rows;
  const std::string text = doc.dump();
  const std::string first = cli::run_text(text, structured()).output;
  for (int k = 0; k < 3; ++k) EXPECT_EQ(cli::run_text(text, structured()).output, first);
  EXPECT_EQ(cli::run_text(dephasing, structured()).output, cli::run_text(dephasing, structured()).output);
}

// Block counts in the report follow from its own rank sequences.
TEST(Run, ReportedBlockCountsFollowFromReportedRanks) {
  const auto j = cli::parse_input(R"({"kind": "raw_matrix", "entries":
      [[2,1,0,0,0,0],[0,2,1,0,0,0],[0,0,2,0,0,0],[0,0,0,2,0,0],[0,0,0,0,-1,1],[0,0,0,0,0,-1]]})");
  for (Backend b : {Backend::floating, Backend::exact}) {
    AnalysisConfig cfg = structured();
    cfg.backend = b;
    cfg.user_spectrum = {Q(2), Q(-1)};
    const json r = json::parse(cli::run(j, cfg).output);
    ASSERT_EQ(r["eigenvalues"].size(), 2u);
    for (const auto& e : r["eigenvalues"]) {
      const auto q = e["q"].get<std::vector<long>>();
      json expected = json::array();
      long geometric = 0;
      for (std::size_t m = 1; m < q.size(); ++m) {
        const long next = m + 1 < q.size() ? q[m + 1] : q.back();
        const long n = q[m - 1] - 2 * q[m] + next;
        if (n > 0) expected.push_back({{"size", m}, {"count", n}});
        geometric += n;
      }
      EXPECT_EQ(e["block_counts"], expected);
      EXPECT_EQ(e.at("geometric_multiplicity"), geometric);
      EXPECT_EQ(e.at("kernel_dimension"), q[0] - q[1]);
    }
    EXPECT_EQ(r["eta_from_blocks"], 2);
  }
}

TEST(Run, TextReportMentionsEta) {
  const auto r = cli::run_text(dephasing, AnalysisConfig{});
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.output.rfind("index of cyclicity: 2\n", 0), 0u) << r.output;
  EXPECT_NE(r.output.find("static tomography would need 3 observables"), std::string::npos);
}
