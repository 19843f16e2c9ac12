#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "curvcheck/commands.hpp"

using namespace curvcheck;

int main(int argc, char** argv) {
  CLI::App app{"Curvature, torse-forming field and soliton checks on coordinate charts"};
  app.require_subcommand(1);

  RunOptions opt;
  std::string json_path;
  std::string kind, connection;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "INI manifold config");
    sub->add_option("--zoo", opt.zoo, "built-in manifold name");
    sub->add_option("--seed", opt.seed, "sampling seed");
    sub->add_option("--samples", opt.samples, "number of sample points");
    sub->add_option("--p", opt.p, "constant scalar field p");
    sub->add_option("--tol", opt.tol, "classification tolerance");
    sub->add_option("--json", json_path, "write the JSON report to this path");
  };

  auto* curvature = app.add_subcommand("curvature", "Christoffel, Riemann, Ricci and scalar curvature per point");
  auto* classify = app.add_subcommand("classify", "torse-forming fit and class of a vector field");
  auto* soliton = app.add_subcommand("soliton", "closed-form lambda and soliton residuals");
  auto* check = app.add_subcommand("check", "invariant suite (every zoo manifold by default)");
  auto* paper = app.add_subcommand("paper-example", "z != 0 worked example: frame tables, curvature, field Y");
  for (auto* sub : {curvature, classify, soliton, check, paper}) common(sub);
  for (auto* sub : {classify, soliton}) sub->add_option("--field", opt.field, "vector field name");
  soliton->add_option("--kind", kind, "yamabe | conformal | star")->check(CLI::IsMember({"yamabe", "conformal", "star"}));
  soliton->add_option("--connection", connection, "lc | ssm | pss")->check(CLI::IsMember({"lc", "ssm", "pss"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (!kind.empty()) opt.kind = parse_soliton_kind(kind);
  if (!connection.empty()) opt.connection = parse_connection_kind(connection);

  CommandResult res;
  try {
    if (*curvature) res = cmd_curvature(opt);
    else if (*classify) res = cmd_classify(opt);
    else if (*soliton) res = cmd_soliton(opt);
    else if (*check) res = cmd_check(opt);
    else res = cmd_paper_example(opt);
  } catch (const std::exception& e) {
    std::cerr << "curvcheck: " << e.what() << "\n";
    return exit_code_for(e);
  }

  std::cout << render_human(res.report);
  if (!json_path.empty()) {
    std::ofstream out(json_path, std::ios::binary);
    if (!out) {
      std::cerr << "curvcheck: cannot write " << json_path << "\n";
      return kExitConfig;
    }
    out << to_json_text(res.report);
  }
  return res.exit_code;
}
