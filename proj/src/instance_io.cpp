#include "sirmax/instance_io.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sirmax {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw std::runtime_error("instance parse error, line " + std::to_string(line) + ": " + what);
}

bool parse_u32(const std::string& tok, std::uint32_t& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  errno = 0;
  unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
  if (errno != 0 || end != tok.c_str() + tok.size() || v > 0xFFFFFFFFull) return false;
  if (!std::isdigit(static_cast<unsigned char>(tok[0]))) return false;  // no leading +/-
  out = static_cast<std::uint32_t>(v);
  return true;
}

bool parse_prob(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(tok.c_str(), &end);
  if (errno != 0 || end != tok.c_str() + tok.size()) return false;
  out = v;
  return true;
}

std::string format_prob(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

}  // namespace

Instance parse_instance(std::string_view text) {
  std::optional<std::uint32_t> n;
  std::optional<Model> model;
  std::optional<std::uint32_t> horizon;
  std::optional<double> gamma_default;
  std::map<NodeId, double> gamma_override;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<double> edge_prob;

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank or comment-only

    auto need_params_ready = [&] {
      if (!n) fail(lineno, "'n' must come first");
      if (!model) fail(lineno, "'model' must come before parameter lines");
    };
    auto rest_is_junk = [&] {
      std::string extra;
      return static_cast<bool>(ls >> extra);
    };

    if (tok == "n") {
      if (n) fail(lineno, "duplicate 'n'");
      std::string v;
      std::uint32_t nv;
      if (!(ls >> v) || !parse_u32(v, nv) || rest_is_junk()) fail(lineno, "expected 'n <int>'");
      if (nv == 0) fail(lineno, "node count must be positive");
      n = nv;
    } else if (tok == "model") {
      if (!n) fail(lineno, "'n' must come first");
      if (model) fail(lineno, "duplicate 'model'");
      std::string v;
      Model m;
      if (!(ls >> v) || !parse_model(v, m) || rest_is_junk())
        fail(lineno, "expected 'model ic|sir|tsir'");
      model = m;
    } else if (tok == "T") {
      need_params_ready();
      if (*model != Model::tsir) fail(lineno, "'T' is only meaningful for model tsir");
      if (horizon) fail(lineno, "duplicate 'T'");
      std::string v;
      std::uint32_t tv;
      if (!(ls >> v) || !parse_u32(v, tv) || rest_is_junk())
        fail(lineno, "expected 'T <non-negative int>'");
      horizon = tv;
    } else if (tok == "gamma_default") {
      need_params_ready();
      if (*model == Model::ic) fail(lineno, "recovery probabilities are not used under ic");
      if (gamma_default) fail(lineno, "duplicate 'gamma_default'");
      std::string v;
      double g;
      if (!(ls >> v) || !parse_prob(v, g) || rest_is_junk())
        fail(lineno, "expected 'gamma_default <float>'");
      if (!(g > 0.0 && g <= 1.0)) fail(lineno, "recovery probability out of (0,1]");
      gamma_default = g;
    } else if (tok == "gamma") {
      need_params_ready();
      if (*model == Model::ic) fail(lineno, "recovery probabilities are not used under ic");
      std::string vtok, gtok;
      std::uint32_t node;
      double g;
      if (!(ls >> vtok >> gtok) || !parse_u32(vtok, node) || !parse_prob(gtok, g) ||
          rest_is_junk())
        fail(lineno, "expected 'gamma <node> <float>'");
      if (node >= *n) fail(lineno, "node id out of range");
      if (!(g > 0.0 && g <= 1.0)) fail(lineno, "recovery probability out of (0,1]");
      if (!gamma_override.emplace(node, g).second) fail(lineno, "duplicate gamma for node");
    } else if (tok == "edge") {
      need_params_ready();
      std::string stok, dtok, ptok;
      std::uint32_t s, d;
      double p;
      if (!(ls >> stok >> dtok >> ptok) || !parse_u32(stok, s) || !parse_u32(dtok, d) ||
          !parse_prob(ptok, p) || rest_is_junk())
        fail(lineno, "expected 'edge <src> <dst> <float>'");
      if (s >= *n || d >= *n) fail(lineno, "node id out of range");
      if (s == d) fail(lineno, "self-loop");
      if (!(p >= 0.0 && p <= 1.0)) fail(lineno, "probability out of [0,1]");
      edges.emplace_back(s, d);
      edge_prob.push_back(p);
    } else {
      fail(lineno, "unknown directive '" + tok + "'");
    }
  }

  if (!n) throw std::runtime_error("instance parse error: missing 'n'");
  if (!model) throw std::runtime_error("instance parse error: missing 'model'");
  if (*model == Model::tsir && !horizon)
    throw std::runtime_error("instance parse error: model tsir requires 'T'");

  std::vector<double> recovery;
  if (*model != Model::ic) {
    recovery.assign(*n, gamma_default.value_or(0.0));
    for (auto [v, g] : gamma_override) recovery[v] = g;
    if (!gamma_default) {
      for (NodeId v = 0; v < *n; ++v)
        if (recovery[v] == 0.0)
          throw std::runtime_error("instance parse error: node " + std::to_string(v) +
                                   " has no recovery probability");
    }
  }

  try {
    return make_instance(*n, *model, std::move(edges), std::move(edge_prob),
                         std::move(recovery), horizon.value_or(0));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("instance parse error: ") + e.what());
  }
}

std::string serialize_instance(const Instance& inst) {
  const DirectedGraph& g = inst.graph;
  const DiffusionParams& par = inst.params;
  std::string out;
  out += "n " + std::to_string(g.num_nodes()) + "\n";
  out += "model " + std::string(model_name(par.model)) + "\n";
  if (par.model == Model::tsir) out += "T " + std::to_string(par.horizon) + "\n";

  if (par.model != Model::ic) {
    // Emit the most common recovery value as the default (bit-exact match),
    // then overrides for the rest; ties go to the smallest bit pattern.
    std::map<std::uint64_t, std::size_t> freq;
    for (double gm : par.node_recovery) {
      std::uint64_t bits;
      static_assert(sizeof bits == sizeof gm);
      __builtin_memcpy(&bits, &gm, sizeof bits);
      ++freq[bits];
    }
    std::uint64_t best_bits = 0;
    std::size_t best_count = 0;
    for (auto [bits, count] : freq)
      if (count > best_count) { best_bits = bits; best_count = count; }
    double def;
    __builtin_memcpy(&def, &best_bits, sizeof def);
    out += "gamma_default " + format_prob(def) + "\n";
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      double gm = par.node_recovery[v];
      std::uint64_t bits;
      __builtin_memcpy(&bits, &gm, sizeof bits);
      if (bits != best_bits)
        out += "gamma " + std::to_string(v) + " " + format_prob(gm) + "\n";
    }
  }

  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    auto [s, d] = g.edge(e);
    out += "edge " + std::to_string(s) + " " + std::to_string(d) + " " +
           format_prob(par.edge_prob[e]) + "\n";
  }
  return out;
}

Instance load_instance(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_instance(buf.str());
}

void save_instance(const std::string& path, const Instance& inst) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write instance file: " + path);
  f << serialize_instance(inst);
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace sirmax
