#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include "ergtower/cli.hpp"

namespace {

using ergtower::cli::CommandResult;
using ergtower::cli::RunConfig;

int emit(const CommandResult& r, const RunConfig& cfg, const std::string& out_path) {
  const auto text = ergtower::cli::render(r, cfg.format);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + out_path);
    f << text;
  }
  return r.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build [dn,ds,dl,D] stabilizer models and verify their ERG fixed points"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string out_path;
  std::string target;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", out_path, "write the report here instead of stdout");
    sub->add_option("--max-qubits", cfg.max_qubits, "qubit cap");
    sub->add_option("--max-configs", cfg.max_configs, "enumerated configuration cap");
  };
  std::function<CommandResult()> action;

  auto* model = app.add_subcommand("model", "single model instances");
  model->require_subcommand(1);
  struct Leaf {
    const char* name;
    const char* help;
    CommandResult (*fn)(const std::string&, const RunConfig&);
  };
  for (const Leaf& leaf : {Leaf{"build", "list the generators", ergtower::cli::cmd_model_build},
                           Leaf{"gsd", "log2 ground-state degeneracy", ergtower::cli::cmd_model_gsd},
                           Leaf{"dualize", "half-shift dual of a toric-family model", ergtower::cli::cmd_model_dualize}}) {
    auto* sub = model->add_subcommand(leaf.name, leaf.help);
    sub->add_option("instance", target, "model instance, e.g. [0,1,2,3]@3x3x3:pbc")->required();
    common(sub);
    auto fn = leaf.fn;
    sub->callback([&, fn] { action = [&, fn] { return fn(target, cfg); }; });
  }

  auto* scan = app.add_subcommand("scan", "scan sizes and fit log2 GSD to a polynomial");
  scan->add_option("spec", target, "model spec, e.g. [0,1,2,3]")->required();
  scan->add_option("--sizes", cfg.sizes, "per-axis sizes: lo..hi or a comma list");
  common(scan);
  scan->callback([&] { action = [&] { return ergtower::cli::cmd_scan_fit(target, cfg); }; });

  auto* erg = app.add_subcommand("erg", "one growth step of the renormalization");
  erg->require_subcommand(1);
  for (const Leaf& leaf : {Leaf{"verify", "fixed-point, recursion, circuit and mapping checks", ergtower::cli::cmd_erg_verify},
                           Leaf{"circuit", "list the CNOT gates", ergtower::cli::cmd_erg_circuit},
                           Leaf{"classify", "classes of the terms near the cut", ergtower::cli::cmd_erg_classify}}) {
    auto* sub = erg->add_subcommand(leaf.name, leaf.help);
    sub->add_option("instance", target, "source instance, e.g. [0,1,2,3]@2x2x2:pbc")->required();
    sub->add_option("--circuit", cfg.circuit, "paper or general")->check(CLI::IsMember({"paper", "general"}));
    sub->add_option("--axis", cfg.axis, "grow axis, 1-based (default: last)");
    common(sub);
    auto fn = leaf.fn;
    sub->callback([&, fn] { action = [&, fn] { return fn(target, cfg); }; });
  }

  auto* coarse = app.add_subcommand("coarse", "vertex-splitting coarse graining of the 2D toric code");
  coarse->require_subcommand(1);
  auto* cverify = coarse->add_subcommand("verify", "GHZ alignment and coarse toric-code support");
  cverify->add_option("--L", cfg.L, "linear size")->required();
  common(cverify);
  cverify->callback([&] { action = [&] { return ergtower::cli::cmd_coarse_verify(cfg); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    return emit(action(), cfg, out_path);
  } catch (const ergtower::parse_error& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const ergtower::resource_error& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
