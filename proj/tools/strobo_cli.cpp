// strobo: index of cyclicity of a matrix or GKLS generator.
//
//   strobo [--rank-tol T] [--cluster-tol T] [--exact --spectrum FILE]
//          [--format text|structured] INPUT
//
// INPUT may be "-" for standard input. Exit codes: 0 ok, 2 parse, 3 spectral,
// 4 convexity violation, 5 route disagreement.

#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "strobo/cli.hpp"

namespace {

std::string slurp(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw strobo::parse_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace strobo;
  CLI::App app{"Index of cyclicity via Jordan block counts and kernel dimensions"};

  std::string input_path;
  std::optional<double> rank_tol, cluster_tol, merge_radius;
  bool exact = false;
  std::string spectrum_path;
  OutputFormat format = OutputFormat::text;
  const std::map<std::string, OutputFormat> formats{{"text", OutputFormat::text},
                                                    {"structured", OutputFormat::structured}};

  app.add_option("input", input_path, "Input document (JSON), or - for stdin")->required();
  app.add_option("--rank-tol", rank_tol, "Relative singular-value threshold for rank decisions")
      ->check(CLI::PositiveNumber);
  app.add_option("--cluster-tol", cluster_tol, "Single-linkage eigenvalue clustering tolerance")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--merge-radius", merge_radius, "Largest cluster height accepted after a rank check")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--exact", exact, "Exact Gaussian-rational arithmetic (needs --spectrum)");
  app.add_option("--spectrum", spectrum_path, "JSON array of the distinct exact eigenvalues")
      ->check(CLI::ExistingFile);
  app.add_option("--format", format, "Report format")->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::exit_parse;
  }

  AnalysisConfig config;
  config.rank_tol = rank_tol;
  config.cluster_tol = cluster_tol;
  config.merge_radius = merge_radius;
  config.backend = exact ? Backend::exact : Backend::floating;
  config.format = format;

  cli::RunResult result;
  std::string text;
  try {
    text = slurp(input_path);
    if (!spectrum_path.empty()) config.user_spectrum = cli::parse_spectrum(slurp(spectrum_path));
    result = cli::run_text(text, config);
  } catch (const strobo::parse_error& e) {
    result = cli::detail::failure(cli::exit_parse, e.what(), config);
  }

  std::cout << result.output;
  for (const auto& line : result.diagnostics) std::cerr << line << "\n";
  return result.exit_code;
}
