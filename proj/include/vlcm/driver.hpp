#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "vlcm/codegen.hpp"
#include "vlcm/cse.hpp"
#include "vlcm/rng.hpp"

namespace vlcm {

struct RunConfig {
  std::string constants_path;
  PartitionConfig partition;
  OptimizationMode mode = OptimizationMode::Area;
  SolverKind solver = SolverKind::Heuristic;
  unsigned input_width = 16;
  bool emit_stats = true;
  bool emit_hdl = false;
  bool emit_multiplier = false;
  bool emit_testbench = false;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
};

// One hex constant per line; '#' starts a comment, blank lines are skipped.
inline std::vector<LargeConstant> load_constants_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open constants file '" + path + "'");
  std::vector<LargeConstant> out;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    out.push_back(parse_hex(line.substr(first, last - first + 1)));
  }
  if (out.empty()) throw ParseError("no constants in '" + path + "'");
  return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& path,
                       const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << text;
}

// independent check of a finished design: corners plus seeded random inputs
inline void check_design(const Design& d, unsigned trials, std::uint64_t seed) {
  const unsigned w = d.input_width;
  std::vector<BigUint> inputs = {0, 1, (BigUint(1) << w) - 1};
  SplitMix64 rng(seed);
  for (unsigned i = 0; i < trials; ++i) inputs.push_back(rng.next_bits(w));
  for (const BigUint& x : inputs) {
    std::vector<BigUint> got = evaluate(d, x);
    for (std::size_t i = 0; i < d.outputs.size(); ++i)
      if (got[i] != d.outputs[i].target * x)
        throw SolverError("simulation mismatch on " + d.outputs[i].name);
  }
}

inline std::string stats_text(const Design& d, const RunConfig& cfg) {
  std::ostringstream os;
  os << "constants " << d.outputs.size() << "\n";
  for (const OutputRef& o : d.outputs)
    os << "  " << o.name << " width " << bit_length(o.target) << " depth "
       << d.graph.node(o.node).depth << "\n";
  os << "p " << cfg.partition.p << "\n";
  os << "strategy "
     << (cfg.partition.strategy == PartitionStrategy::Strict ? "strict"
                                                             : "common-digit")
     << "\n";
  os << "mode " << (cfg.mode == OptimizationMode::Area ? "area" : "delay")
     << "\n";
  os << "oper " << d.stats.oper << "\n";
  os << "step " << d.stats.step << "\n";
  os << "seconds " << std::fixed << std::setprecision(3) << d.stats.seconds
     << "\n";
  return os.str();
}

}  // namespace detail

// Builds, simulates against the plain product, writes requested artifacts,
// prints one report row.
inline Design run(const RunConfig& cfg, std::ostream& report = std::cout) {
  check_partition_width(cfg.partition.p);
  std::vector<LargeConstant> constants = load_constants_file(cfg.constants_path);
  Design design = build_design(constants, cfg.partition, cfg.solver, cfg.mode,
                               cfg.input_width);
  detail::check_design(design, 1000, cfg.seed);

  std::filesystem::path out(cfg.out_dir);
  std::filesystem::create_directories(out);
  detail::write_file(out / "design.txt", dump_design(design));

  HdlConfig hcfg;
  hcfg.input_width = cfg.input_width;
  hcfg.seed = cfg.seed;
  if (cfg.emit_stats)
    detail::write_file(out / "stats.txt", detail::stats_text(design, cfg));
  if (cfg.emit_hdl)
    detail::write_file(out / "vlcm.v", emit_shift_adds_hdl(design, hcfg));
  if (cfg.emit_multiplier)
    detail::write_file(out / "vlcm_mul.v", emit_multiplier_hdl(constants, hcfg));
  if (cfg.emit_testbench)
    detail::write_file(out / "vlcm_tb.v", emit_testbench(design, hcfg));

  unsigned max_width = 0;
  for (const LargeConstant& c : constants)
    max_width = std::max(max_width, c.bit_width);
  report << cfg.constants_path << " width " << max_width << " oper "
         << design.stats.oper << " step " << design.stats.step << " seconds "
         << std::fixed << std::setprecision(3) << design.stats.seconds << "\n";
  return design;
}

struct BenchSpec {
  unsigned n = 1;                       // constants per instance
  std::vector<unsigned> widths;         // constant bit widths
  unsigned instances = 10;              // random instances per width
  std::vector<unsigned> p_values;       // partition widths
  std::vector<OptimizationMode> modes;
  std::uint64_t seed = 1;
  unsigned input_width = 32;
};

// Sweeps width x p x strategy x mode over seeded random instances and writes
// one CSV row per configuration.  The same instances are reused across
// configurations so rows are comparable.
inline void bench(const BenchSpec& spec, std::ostream& csv,
                  std::ostream& log = std::cerr) {
  for (unsigned p : spec.p_values) check_partition_width(p);
  csv << "width,p,strategy,mode,avg_oper,avg_step,avg_seconds\n";
  for (unsigned width : spec.widths) {
    std::vector<std::vector<LargeConstant>> sets;
    for (unsigned i = 0; i < spec.instances; ++i) {
      SplitMix64 rng(spec.seed * 0x10001 + width * 1000 + i);
      std::vector<LargeConstant> lcs;
      for (unsigned k = 0; k < spec.n; ++k) {
        LargeConstant lc;
        lc.value = rng.next_odd_constant(width);
        lc.bit_width = width;
        lcs.push_back(std::move(lc));
      }
      sets.push_back(std::move(lcs));
    }
    for (unsigned p : spec.p_values)
      for (PartitionStrategy strategy :
           {PartitionStrategy::Strict, PartitionStrategy::CommonDigit})
        for (OptimizationMode mode : spec.modes) {
          double oper = 0, step = 0, seconds = 0;
          for (const std::vector<LargeConstant>& lcs : sets) {
            PartitionConfig pcfg{p, strategy};
            Design d = build_design(lcs, pcfg, SolverKind::Heuristic, mode,
                                    spec.input_width);
            detail::check_design(d, 20, spec.seed);
            oper += static_cast<double>(d.stats.oper);
            step += d.stats.step;
            seconds += d.stats.seconds;
          }
          const double inst = spec.instances;
          csv << width << ',' << p << ','
              << (strategy == PartitionStrategy::Strict ? "strict"
                                                        : "common-digit")
              << ','
              << (mode == OptimizationMode::Area ? "area" : "delay") << ','
              << std::fixed << std::setprecision(2) << oper / inst << ','
              << step / inst << ',' << std::setprecision(3) << seconds / inst
              << "\n";
          log << "bench width=" << width << " p=" << p << " done\n";
        }
  }
}

// Re-checks a previously written design.txt: functional simulation plus
// structural invariants (topological ids, recomputed depths, depth lower
// bound from the nonzero-digit count of each target).
inline void verify(const std::string& out_dir, unsigned trials,
                   std::uint64_t seed = 1, std::ostream& report = std::cout) {
  std::filesystem::path path = std::filesystem::path(out_dir) / "design.txt";
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  Design d = parse_design_dump(in);

  for (const Node& n : d.graph.nodes()) {
    if (n.op == NodeOp::Input) continue;
    if (n.lhs >= n.id || n.rhs >= n.id)
      throw SolverError("node operands are not topologically ordered");
    BigUint lhs = d.graph.node(n.lhs).value << n.lhs_shift;
    BigUint rhs = d.graph.node(n.rhs).value << n.rhs_shift;
    BigUint v = n.op == NodeOp::Add ? BigUint(lhs + rhs) : BigUint(lhs - rhs);
    if (v != n.value) throw SolverError("node value does not match operands");
    unsigned depth = std::max(d.graph.node(n.lhs).depth,
                              d.graph.node(n.rhs).depth) + 1;
    if (depth != n.depth) throw SolverError("stored depth is inconsistent");
  }
  for (const OutputRef& o : d.outputs) {
    if (d.graph.node(o.node).value << o.shift != o.target)
      throw SolverError("output does not reproduce its target");
    if (d.graph.node(o.node).depth < min_adder_steps(o.target))
      throw SolverError("depth below the theoretical lower bound");
  }
  detail::check_design(d, trials, seed);
  report << out_dir << " ok: " << d.outputs.size() << " output(s), "
         << d.graph.operation_count() << " operation(s), " << trials
         << " random trial(s)\n";
}

}  // namespace vlcm
