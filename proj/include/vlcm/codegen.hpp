#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "vlcm/adder_graph.hpp"
#include "vlcm/rng.hpp"

namespace vlcm {

struct HdlConfig {
  std::string module_name = "vlcm";
  unsigned input_width = 16;
  unsigned vector_count = 10000;
  std::uint64_t seed = 1;
};

namespace detail {

inline void check_identifier(const std::string& name) {
  bool ok = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) ||
                              name[0] == '_');
  for (char c : name)
    ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
  if (!ok) throw ConfigError("invalid HDL identifier: '" + name + "'");
}

inline std::string wire_name(const Node& n) {
  if (n.op == NodeOp::Input) return "x";
  if (!n.label.empty()) return n.label;
  return "n" + std::to_string(n.id);
}

inline std::string shifted(const std::string& name, unsigned shift) {
  if (shift == 0) return name;
  return "(" + name + " << " + std::to_string(shift) + ")";
}

inline std::string hex_literal(const BigUint& v, unsigned width) {
  std::string digits = v.str(0, std::ios_base::hex);
  for (char& c : digits) c = static_cast<char>(std::tolower(c));
  return std::to_string(width) + "'h" + digits;
}

}  // namespace detail

// Behavioral shift-adds module: one continuous assign per node, shifts are
// wiring only, everything unsigned.
inline std::string emit_shift_adds_hdl(const Design& design,
                                       const HdlConfig& cfg) {
  detail::check_identifier(cfg.module_name);
  const unsigned w = cfg.input_width;
  std::ostringstream os;
  os << "// " << cfg.module_name << ": shift-adds realization of "
     << design.outputs.size() << " constant multiplication(s)\n";
  os << "module " << cfg.module_name << " (\n";
  os << "  input  wire [" << w - 1 << ":0] x";
  for (const OutputRef& o : design.outputs) {
    unsigned ow = output_width(o.target, w);
    os << ",\n  output wire [" << ow - 1 << ":0] " << o.name;
  }
  os << "\n);\n\n";
  for (const Node& n : design.graph.nodes()) {
    if (n.op == NodeOp::Input) continue;
    unsigned nw = output_width(n.value, w);
    os << "  wire [" << nw - 1 << ":0] " << detail::wire_name(n) << ";\n";
  }
  os << "\n";
  for (const Node& n : design.graph.nodes()) {
    if (n.op == NodeOp::Input) continue;
    const std::string lhs =
        detail::shifted(detail::wire_name(design.graph.node(n.lhs)), n.lhs_shift);
    const std::string rhs =
        detail::shifted(detail::wire_name(design.graph.node(n.rhs)), n.rhs_shift);
    os << "  assign " << detail::wire_name(n) << " = " << lhs
       << (n.op == NodeOp::Add ? " + " : " - ") << rhs << ";\n";
  }
  os << "\n";
  for (const OutputRef& o : design.outputs)
    os << "  assign " << o.name << " = "
       << detail::shifted(detail::wire_name(design.graph.node(o.node)), o.shift)
       << ";\n";
  os << "\nendmodule\n";
  return os.str();
}

// Reference module: each output as a literal constant times x.
inline std::string emit_multiplier_hdl(const std::vector<LargeConstant>& constants,
                                       const HdlConfig& cfg) {
  detail::check_identifier(cfg.module_name);
  const unsigned w = cfg.input_width;
  std::ostringstream os;
  os << "module " << cfg.module_name << " (\n";
  os << "  input  wire [" << w - 1 << ":0] x";
  for (std::size_t i = 0; i < constants.size(); ++i) {
    unsigned ow = output_width(constants[i].value, w);
    os << ",\n  output wire [" << ow - 1 << ":0] lc_" << i + 1;
  }
  os << "\n);\n\n";
  for (std::size_t i = 0; i < constants.size(); ++i) {
    const LargeConstant& c = constants[i];
    if (c.value == 1) {
      os << "  assign lc_" << i + 1 << " = x;\n";
    } else {
      os << "  assign lc_" << i + 1 << " = "
         << detail::hex_literal(c.value, c.bit_width) << " * x;\n";
    }
  }
  os << "\nendmodule\n";
  return os.str();
}

// Self-checking bench: corner vectors plus seeded random vectors, expected
// values precomputed and embedded as literals.
inline std::string emit_testbench(const Design& design, const HdlConfig& cfg) {
  detail::check_identifier(cfg.module_name);
  const unsigned w = cfg.input_width;
  std::ostringstream os;
  os << "`timescale 1ns/1ps\n";
  os << "module " << cfg.module_name << "_tb;\n\n";
  os << "  reg [" << w - 1 << ":0] x;\n";
  for (const OutputRef& o : design.outputs) {
    unsigned ow = output_width(o.target, w);
    os << "  wire [" << ow - 1 << ":0] " << o.name << ";\n";
  }
  os << "  integer errors;\n\n";
  os << "  " << cfg.module_name << " dut (.x(x)";
  for (const OutputRef& o : design.outputs)
    os << ", ." << o.name << "(" << o.name << ")";
  os << ");\n\n";

  std::vector<BigUint> vectors;
  const BigUint max_x = (BigUint(1) << w) - 1;
  vectors.push_back(0);
  vectors.push_back(1);
  vectors.push_back(max_x);
  SplitMix64 rng(cfg.seed);
  for (unsigned i = 0; i < cfg.vector_count; ++i)
    vectors.push_back(rng.next_bits(w));

  os << "  initial begin\n";
  os << "    errors = 0;\n";
  for (const BigUint& v : vectors) {
    os << "    x = " << detail::hex_literal(v, w) << "; #1;\n";
    for (const OutputRef& o : design.outputs) {
      unsigned ow = output_width(o.target, w);
      BigUint expected = o.target * v;
      os << "    if (" << o.name << " !== " << detail::hex_literal(expected, ow)
         << ") begin errors = errors + 1; $display(\"FAIL " << o.name
         << " x=%h\", x); end\n";
    }
  }
  os << "    if (errors == 0) $display(\"PASS: %0d vectors\", "
     << vectors.size() << ");\n";
  os << "    else $display(\"FAIL: %0d errors\", errors);\n";
  os << "    $finish;\n";
  os << "  end\n\nendmodule\n";
  return os.str();
}

}  // namespace vlcm
