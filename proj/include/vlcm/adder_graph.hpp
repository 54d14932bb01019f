#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vlcm/numeric.hpp"

namespace vlcm {

enum class NodeOp { Input, Add, Sub };

// One shift-add/sub node.  value is the exact constant the node stands for;
// the input node has value 1 and depth 0.
struct Node {
  std::uint32_t id = 0;
  NodeOp op = NodeOp::Input;
  std::uint32_t lhs = 0, rhs = 0;
  unsigned lhs_shift = 0, rhs_shift = 0;
  BigUint value = 1;
  unsigned depth = 0;
  std::string label;
};

// DAG over one input variable with value-level structural sharing: inserting
// a node whose value already exists returns the existing node.
class AdderGraph {
 public:
  AdderGraph() {
    Node input;
    input.label = "x";
    nodes_.push_back(input);
    by_value_[BigUint(1)] = 0;
  }

  std::uint32_t input_node() const { return 0; }
  const Node& node(std::uint32_t id) const { return nodes_.at(id); }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t operation_count() const { return nodes_.size() - 1; }

  void set_label(std::uint32_t id, const std::string& label) {
    if (nodes_.at(id).label.empty()) nodes_[id].label = label;
  }

  std::optional<std::uint32_t> find_value(const BigUint& v) const {
    auto it = by_value_.find(v);
    if (it == by_value_.end()) return std::nullopt;
    return it->second;
  }

  std::uint32_t add_node(NodeOp op, std::uint32_t lhs, unsigned lhs_shift,
                         std::uint32_t rhs, unsigned rhs_shift,
                         const std::string& label = "") {
    if (op == NodeOp::Input) throw SolverError("cannot add a second input node");
    if (lhs >= nodes_.size() || rhs >= nodes_.size())
      throw SolverError("unknown operand node");
    BigUint l = nodes_[lhs].value << lhs_shift;
    BigUint r = nodes_[rhs].value << rhs_shift;
    BigUint v = (op == NodeOp::Add) ? BigUint(l + r) : BigUint(l - r);
    if (v <= 0) throw SolverError("node value must be strictly positive");
    if (auto existing = find_value(v)) {
      if (!label.empty() && nodes_[*existing].label.empty())
        nodes_[*existing].label = label;
      return *existing;
    }
    Node n;
    n.id = static_cast<std::uint32_t>(nodes_.size());
    n.op = op;
    n.lhs = lhs;
    n.rhs = rhs;
    n.lhs_shift = lhs_shift;
    n.rhs_shift = rhs_shift;
    n.depth = 1 + std::max(nodes_[lhs].depth, nodes_[rhs].depth);
    n.label = label;
    n.value = std::move(v);
    by_value_[n.value] = n.id;
    nodes_.push_back(std::move(n));
    return nodes_.back().id;
  }

 private:
  std::vector<Node> nodes_;
  std::map<BigUint, std::uint32_t> by_value_;
};

// A design output: node << shift realizes the named target constant.
struct OutputRef {
  std::uint32_t node = 0;
  unsigned shift = 0;
  std::string name;
  BigUint target;
};

struct DesignStats {
  std::size_t oper = 0;    // non-input node count
  unsigned step = 0;       // max depth over output nodes
  double seconds = 0.0;    // build time (partition + solve + CSE + assembly)
};

struct Design {
  AdderGraph graph;
  std::vector<OutputRef> outputs;
  unsigned input_width = 16;
  DesignStats stats;
};

// Bit-length of value(node) * (2^input_width - 1): the widest result the node
// can produce for an input of the declared width.
inline unsigned output_width(const BigUint& node_value, unsigned input_width) {
  return bit_length(node_value * ((BigUint(1) << input_width) - 1));
}

inline DesignStats compute_stats(const Design& d) {
  DesignStats s;
  s.oper = d.graph.operation_count();
  for (const OutputRef& o : d.outputs)
    s.step = std::max(s.step, d.graph.node(o.node).depth);
  s.seconds = d.stats.seconds;
  return s;
}

// Evaluates every output for a concrete x by walking the node list (node ids
// are already topologically ordered by construction).
inline std::vector<BigUint> evaluate(const Design& d, const BigUint& x) {
  std::vector<BigUint> value(d.graph.nodes().size());
  for (const Node& n : d.graph.nodes()) {
    switch (n.op) {
      case NodeOp::Input:
        value[n.id] = x;
        break;
      case NodeOp::Add:
        value[n.id] = (value[n.lhs] << n.lhs_shift) + (value[n.rhs] << n.rhs_shift);
        break;
      case NodeOp::Sub:
        value[n.id] = (value[n.lhs] << n.lhs_shift) - (value[n.rhs] << n.rhs_shift);
        break;
    }
  }
  std::vector<BigUint> out;
  out.reserve(d.outputs.size());
  for (const OutputRef& o : d.outputs) out.push_back(value[o.node] << o.shift);
  return out;
}

// Deterministic text dump, one node per line, then one line per output.
inline std::string dump_design(const Design& d) {
  std::ostringstream os;
  os << "input_width " << d.input_width << "\n";
  for (const Node& n : d.graph.nodes()) {
    os << n.id << " ";
    switch (n.op) {
      case NodeOp::Input: os << "input"; break;
      case NodeOp::Add: os << "add " << n.lhs << "<<" << n.lhs_shift << " "
                           << n.rhs << "<<" << n.rhs_shift; break;
      case NodeOp::Sub: os << "sub " << n.lhs << "<<" << n.lhs_shift << " "
                           << n.rhs << "<<" << n.rhs_shift; break;
    }
    os << " value " << n.value.str(0, std::ios_base::hex)
       << " depth " << n.depth
       << " width " << output_width(n.value, d.input_width);
    if (!n.label.empty()) os << " label " << n.label;
    os << "\n";
  }
  for (const OutputRef& o : d.outputs)
    os << "output " << o.name << " " << o.node << "<<" << o.shift << " "
       << o.target.str(0, std::ios_base::hex) << "\n";
  return os.str();
}

inline Design parse_design_dump(std::istream& in) {
  Design d;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "input_width") {
      ls >> d.input_width;
    } else if (tok == "output") {
      OutputRef o;
      std::string ref, hex;
      ls >> o.name >> ref >> hex;
      auto at = ref.find("<<");
      o.node = static_cast<std::uint32_t>(std::stoul(ref.substr(0, at)));
      o.shift = static_cast<unsigned>(std::stoul(ref.substr(at + 2)));
      o.target = parse_hex(hex).value;
      d.outputs.push_back(std::move(o));
    } else if (!tok.empty()) {
      std::string op;
      ls >> op;
      if (op == "input") continue;  // implicit in the fresh graph
      auto parse_ref = [&](std::uint32_t& id, unsigned& sh) {
        std::string ref;
        ls >> ref;
        auto at = ref.find("<<");
        id = static_cast<std::uint32_t>(std::stoul(ref.substr(0, at)));
        sh = static_cast<unsigned>(std::stoul(ref.substr(at + 2)));
      };
      std::uint32_t lhs, rhs;
      unsigned ls_sh, rs_sh;
      parse_ref(lhs, ls_sh);
      parse_ref(rhs, rs_sh);
      std::string kw, valhex, label;
      unsigned depth_ignored, width_ignored;
      ls >> kw >> valhex >> kw >> depth_ignored >> kw >> width_ignored;
      if (ls >> kw && kw == "label") ls >> label;
      std::uint32_t id = d.graph.add_node(op == "add" ? NodeOp::Add : NodeOp::Sub,
                                          lhs, ls_sh, rhs, rs_sh, label);
      if (id != std::stoul(tok))
        throw ParseError("design dump is not in canonical form");
      if (d.graph.node(id).value != parse_hex(valhex).value)
        throw ParseError("design dump value mismatch at node " + tok);
    }
  }
  return d;
}

// Union of several designs over one shared input, with value-level dedup.
inline Design merge(const std::vector<Design>& designs) {
  Design out;
  if (!designs.empty()) out.input_width = designs.front().input_width;
  for (const Design& d : designs) {
    std::vector<std::uint32_t> remap(d.graph.nodes().size(), 0);
    for (const Node& n : d.graph.nodes()) {
      if (n.op == NodeOp::Input) {
        remap[n.id] = out.graph.input_node();
        continue;
      }
      remap[n.id] = out.graph.add_node(n.op, remap[n.lhs], n.lhs_shift,
                                       remap[n.rhs], n.rhs_shift, n.label);
    }
    for (const OutputRef& o : d.outputs)
      out.outputs.push_back({remap[o.node], o.shift, o.name, o.target});
  }
  out.stats = compute_stats(out);
  return out;
}

}  // namespace vlcm
