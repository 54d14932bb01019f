// vlcm: shift-add synthesis of very large constant multiplications.
//
// Exit codes: 0 ok, 1 input parse failure, 2 bad configuration,
// 3 internal verification failure.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "vlcm/driver.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shift-add synthesis of very large constant multiplications"};
  app.require_subcommand(1);

  // --- run ---
  vlcm::RunConfig rc;
  std::string strategy = "strict", mode = "area", solver = "heuristic";
  std::string emit = "stats";
  CLI::App* run = app.add_subcommand("run", "synthesize one constants file");
  run->add_option("--constants", rc.constants_path, "hex constants, one per line")
      ->required();
  run->add_option("--p", rc.partition.p, "partition width in bits");
  run->add_option("--strategy", strategy, "strict|common-digit");
  run->add_option("--mode", mode, "area|delay");
  run->add_option("--solver", solver, "heuristic|exact|dbr-bin|dbr-csd");
  run->add_option("--input-width", rc.input_width, "input variable width");
  run->add_option("--emit", emit, "comma list of stats,hdl,multiplier,testbench");
  run->add_option("--seed", rc.seed, "seed for simulation vectors");
  run->add_option("--out", rc.out_dir, "output directory");

  // --- bench ---
  vlcm::BenchSpec bs;
  std::string widths = "400,600,800,1000", ps = "16", modes = "area";
  std::string csv_path = "bench.csv";
  CLI::App* bench = app.add_subcommand("bench", "sweep random instances");
  bench->add_option("--n", bs.n, "constants per instance");
  bench->add_option("--widths", widths, "comma list of constant widths");
  bench->add_option("--instances", bs.instances, "instances per width");
  bench->add_option("--p", ps, "comma list of partition widths");
  bench->add_option("--modes", modes, "comma list of area,delay");
  bench->add_option("--seed", bs.seed, "instance generator seed");
  bench->add_option("--input-width", bs.input_width, "input variable width");
  bench->add_option("--csv", csv_path, "CSV output path");

  // --- verify ---
  std::string verify_dir = "out";
  unsigned trials = 1000;
  std::uint64_t verify_seed = 1;
  CLI::App* verify = app.add_subcommand("verify", "re-check a written design");
  verify->add_option("--out", verify_dir, "directory holding design.txt");
  verify->add_option("--trials", trials, "random simulation trials");
  verify->add_option("--seed", verify_seed, "trial generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const std::map<std::string, vlcm::PartitionStrategy> strategies = {
          {"strict", vlcm::PartitionStrategy::Strict},
          {"common-digit", vlcm::PartitionStrategy::CommonDigit}};
      const std::map<std::string, vlcm::OptimizationMode> mode_names = {
          {"area", vlcm::OptimizationMode::Area},
          {"delay", vlcm::OptimizationMode::Delay}};
      const std::map<std::string, vlcm::SolverKind> solvers = {
          {"heuristic", vlcm::SolverKind::Heuristic},
          {"exact", vlcm::SolverKind::ExactSmall},
          {"dbr-bin", vlcm::SolverKind::DbrBinary},
          {"dbr-csd", vlcm::SolverKind::DbrCsd}};
      if (!strategies.count(strategy))
        throw vlcm::ConfigError("unknown strategy '" + strategy + "'");
      if (!mode_names.count(mode))
        throw vlcm::ConfigError("unknown mode '" + mode + "'");
      if (!solvers.count(solver))
        throw vlcm::ConfigError("unknown solver '" + solver + "'");
      rc.partition.strategy = strategies.at(strategy);
      rc.mode = mode_names.at(mode);
      rc.solver = solvers.at(solver);
      rc.emit_stats = rc.emit_hdl = rc.emit_multiplier = rc.emit_testbench =
          false;
      for (const std::string& e : split_list(emit)) {
        if (e == "stats") rc.emit_stats = true;
        else if (e == "hdl") rc.emit_hdl = true;
        else if (e == "multiplier") rc.emit_multiplier = true;
        else if (e == "testbench") rc.emit_testbench = true;
        else throw vlcm::ConfigError("unknown emit kind '" + e + "'");
      }
      vlcm::run(rc);
    } else if (*bench) {
      for (const std::string& w : split_list(widths))
        bs.widths.push_back(static_cast<unsigned>(std::stoul(w)));
      for (const std::string& p : split_list(ps))
        bs.p_values.push_back(static_cast<unsigned>(std::stoul(p)));
      for (const std::string& m : split_list(modes)) {
        if (m == "area") bs.modes.push_back(vlcm::OptimizationMode::Area);
        else if (m == "delay") bs.modes.push_back(vlcm::OptimizationMode::Delay);
        else throw vlcm::ConfigError("unknown mode '" + m + "'");
      }
      if (bs.widths.empty() || bs.p_values.empty() || bs.modes.empty())
        throw vlcm::ConfigError("empty sweep dimension");
      std::ofstream csv(csv_path, std::ios::binary);
      if (!csv) throw vlcm::ConfigError("cannot write '" + csv_path + "'");
      vlcm::bench(bs, csv);
    } else {
      vlcm::verify(verify_dir, trials, verify_seed);
    }
  } catch (const vlcm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const vlcm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
