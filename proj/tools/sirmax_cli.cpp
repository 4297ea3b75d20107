// Command-line front end: instance generation, cascade simulation, RR-based
// estimation and seed selection, IC/SIR dominance comparison, coupling
// verification, and gadget parameter scans.  Every run prints one JSON
// object {manifest, result}; identical arguments reproduce identical bytes
// except for manifest.duration_ms.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sirmax/coupling.hpp"
#include "sirmax/generators.hpp"
#include "sirmax/imm.hpp"
#include "sirmax/instance_io.hpp"
#include "sirmax/prob.hpp"
#include "sirmax/rr.hpp"
#include "sirmax/simulate.hpp"
#include "sirmax/version.hpp"

using nlohmann::json;
using namespace sirmax;

namespace {

std::vector<NodeId> parse_id_list(const std::string& text, const std::string& flag) {
  std::vector<NodeId> out;
  std::size_t at = 0;
  while (at <= text.size()) {
    std::size_t comma = text.find(',', at);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(at, comma - at);
    try {
      std::size_t used = 0;
      unsigned long v = std::stoul(item, &used);
      if (used != item.size() || v > 0xFFFFFFFFul) throw std::invalid_argument(item);
      out.push_back(static_cast<NodeId>(v));
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "'" + item + "' is not a node id");
    }
    at = comma + 1;
  }
  return out;
}

json manifest_json(const std::string& command, json params, std::uint64_t seed, int threads,
                   long long duration_ms) {
  return json{{"command", command}, {"params", std::move(params)}, {"seed", seed},
              {"threads", threads}, {"version", kVersion}, {"duration_ms", duration_ms}};
}

void emit(const json& manifest, const json& result) {
  json doc{{"manifest", manifest}, {"result", result}};
  std::cout << doc.dump(2) << "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out.flush()) throw std::runtime_error("write failed: " + path);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  long long ms() const {
    auto dt = std::chrono::steady_clock::now() - t0;
    return std::chrono::duration_cast<std::chrono::milliseconds>(dt).count();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cascade simulation and influence maximization toolkit"};
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "generate an instance file");
  std::string gen_type, gen_model = "sir", gen_out;
  std::uint32_t gen_n = 0, gen_horizon = 0, gen_leaves = 0, gen_length = 0;
  std::uint32_t gen_b = 0, gen_n0 = 0, gen_copies = 0, gen_star_leaves = 0;
  double gen_density = 0.0, gen_beta = 0.0, gen_gamma = 0.0, gen_left_beta = 0.0;
  std::uint64_t gen_seed = 1;
  gen->add_option("--type", gen_type, "er | star | path | fan | choice")
      ->required()
      ->check(CLI::IsMember({"er", "star", "path", "fan", "choice"}));
  gen->add_option("--model", gen_model, "ic | sir | tsir")
      ->check(CLI::IsMember({"ic", "sir", "tsir"}));
  gen->add_option("--out", gen_out, "instance file to write")->required();
  gen->add_option("--n", gen_n, "er: node count");
  gen->add_option("--density", gen_density, "er: ordered-pair edge probability");
  gen->add_option("--leaves", gen_leaves, "star: leaf count");
  gen->add_option("--length", gen_length, "path: edge count");
  gen->add_option("--b", gen_b, "fan/choice: dashed fan width");
  gen->add_option("--n0", gen_n0, "fan/choice: sink count per hub");
  gen->add_option("--copies", gen_copies, "choice: fan copies on the right branch");
  gen->add_option("--star-leaves", gen_star_leaves, "choice: left star leaf count");
  gen->add_option("--left-beta", gen_left_beta, "choice: left star transmission probability");
  gen->add_option("--beta", gen_beta, "transmission (ic: activation) probability");
  gen->add_option("--gamma", gen_gamma, "recovery probability (sir/tsir)");
  gen->add_option("--horizon", gen_horizon, "tsir round budget");
  gen->add_option("--seed", gen_seed, "generator seed");

  // ---- sim ----
  auto* sim = app.add_subcommand("sim", "Monte-Carlo influence of a seed set");
  std::string sim_instance, sim_seeds;
  std::uint64_t sim_runs = 10000, sim_seed = 1;
  int sim_threads = 0;
  sim->add_option("--instance", sim_instance)->required();
  sim->add_option("--seeds", sim_seeds, "comma-separated node ids")->required();
  sim->add_option("--runs", sim_runs);
  sim->add_option("--seed", sim_seed);
  sim->add_option("--threads", sim_threads, "0 = machine parallelism");

  // ---- estimate ----
  auto* est = app.add_subcommand("estimate", "RR-sample influence of a seed set");
  std::string est_instance, est_seeds;
  std::uint64_t est_samples = 10000, est_seed = 1;
  int est_threads = 0;
  est->add_option("--instance", est_instance)->required();
  est->add_option("--seeds", est_seeds, "comma-separated node ids")->required();
  est->add_option("--samples", est_samples, "RR sample count");
  est->add_option("--seed", est_seed);
  est->add_option("--threads", est_threads, "0 = machine parallelism");

  // ---- select ----
  auto* sel = app.add_subcommand("select", "pick an approximately optimal seed set");
  std::string sel_instance;
  std::uint32_t sel_k = 1;
  double sel_eps = 0.1, sel_ell = 1.0;
  std::uint64_t sel_seed = 1;
  int sel_threads = 0;
  sel->add_option("--instance", sel_instance)->required();
  sel->add_option("--k", sel_k, "seed budget")->required();
  sel->add_option("--epsilon", sel_eps, "approximation slack, in (0,1)");
  sel->add_option("--ell", sel_ell, "failure-probability exponent, >= 1");
  sel->add_option("--seed", sel_seed);
  sel->add_option("--threads", sel_threads, "0 = machine parallelism");

  // ---- compare ----
  auto* cmp = app.add_subcommand("compare", "sir influence vs the matched ic instance");
  std::string cmp_instance, cmp_csv;
  std::vector<std::string> cmp_seed_sets;
  std::uint64_t cmp_runs = 100000, cmp_seed = 1;
  int cmp_threads = 0;
  cmp->add_option("--instance", cmp_instance, "sir instance")->required();
  cmp->add_option("--seeds", cmp_seed_sets, "seed set as comma-separated ids; repeatable")
      ->required();
  cmp->add_option("--runs", cmp_runs, "cascades per estimate and coupled samples");
  cmp->add_option("--seed", cmp_seed);
  cmp->add_option("--threads", cmp_threads, "0 = machine parallelism");
  cmp->add_option("--csv", cmp_csv, "also write rows as CSV");

  // ---- couple ----
  auto* cpl = app.add_subcommand("couple", "paired ic/sir reverse samples from one root");
  std::string cpl_instance;
  std::uint32_t cpl_root = 0;
  std::uint64_t cpl_runs = 10000, cpl_seed = 1;
  cpl->add_option("--instance", cpl_instance, "sir instance")->required();
  cpl->add_option("--root", cpl_root)->required();
  cpl->add_option("--runs", cpl_runs);
  cpl->add_option("--seed", cpl_seed);

  // ---- gadget-scan ----
  auto* scan = app.add_subcommand("gadget-scan", "hub infection probabilities over a grid");
  std::vector<std::uint64_t> scan_b;
  std::vector<double> scan_beta, scan_gamma;
  std::string scan_csv;
  scan->add_option("--b", scan_b, "fan widths")->required()->delimiter(',');
  scan->add_option("--beta", scan_beta, "transmission probabilities")->required()->delimiter(',');
  scan->add_option("--gamma", scan_gamma, "recovery probabilities")->required()->delimiter(',');
  scan->add_option("--csv", scan_csv, "also write rows as CSV");

  try {
    app.parse(argc, argv);

    if (*gen) {
      Timer timer;
      GeneratorSpec spec;
      if (gen_type == "er") spec.kind = GeneratorSpec::Kind::erdos_renyi;
      else if (gen_type == "star") spec.kind = GeneratorSpec::Kind::star;
      else if (gen_type == "path") spec.kind = GeneratorSpec::Kind::path;
      else if (gen_type == "fan") spec.kind = GeneratorSpec::Kind::fan_gadget;
      else spec.kind = GeneratorSpec::Kind::choice_gadget;
      parse_model(gen_model, spec.model);
      spec.horizon = gen_horizon;
      spec.n = gen_n;
      spec.edge_density = gen_density;
      spec.leaves = gen_leaves;
      spec.length = gen_length;
      spec.b = gen_b;
      spec.n0 = gen_n0;
      spec.star_leaves = gen_star_leaves;
      spec.gadget_copies = gen_copies;
      spec.left_edge_prob = gen_left_beta;
      spec.beta = gen_beta;
      spec.gamma = gen_gamma;
      Rng rng = Rng::stream(gen_seed, 0);
      Instance inst = generate(spec, rng);

      json params{{"type", gen_type},   {"model", gen_model},
                  {"out", gen_out},     {"n", gen_n},
                  {"density", gen_density}, {"leaves", gen_leaves},
                  {"length", gen_length},   {"b", gen_b},
                  {"n0", gen_n0},       {"copies", gen_copies},
                  {"star_leaves", gen_star_leaves}, {"left_beta", gen_left_beta},
                  {"beta", gen_beta},   {"gamma", gen_gamma},
                  {"horizon", gen_horizon}};
      json man = manifest_json("gen", params, gen_seed, 1, timer.ms());
      // The file is itself an artifact, so the manifest rides along in a
      // comment line the parser skips.
      write_text_file(gen_out, "# " + man.dump() + "\n" + serialize_instance(inst));
      emit(man, json{{"path", gen_out},
                     {"nodes", inst.graph.num_nodes()},
                     {"edges", inst.graph.num_edges()},
                     {"model", std::string(model_name(inst.params.model))}});
    } else if (*sim) {
      Timer timer;
      Instance inst = load_instance(sim_instance);
      std::vector<NodeId> seeds = parse_id_list(sim_seeds, "--seeds");
      SigmaEstimate est_out = estimate_sigma(inst, seeds, sim_runs, sim_seed, sim_threads);
      json params{{"instance", sim_instance}, {"seeds", sim_seeds}, {"runs", sim_runs}};
      emit(manifest_json("sim", params, sim_seed, sim_threads, timer.ms()),
           json{{"mean", est_out.mean}, {"stderr", est_out.stderr_}, {"runs", est_out.runs}});
    } else if (*est) {
      Timer timer;
      Instance inst = load_instance(est_instance);
      std::vector<NodeId> seeds = parse_id_list(est_seeds, "--seeds");
      RRCollection coll(inst);
      coll.grow(est_samples, est_seed, est_threads);
      double frac = coll.coverage_fraction(seeds);
      double n = static_cast<double>(inst.graph.num_nodes());
      double se = n * std::sqrt(frac * (1.0 - frac) / static_cast<double>(coll.size()));
      json params{{"instance", est_instance}, {"seeds", est_seeds}, {"samples", est_samples}};
      emit(manifest_json("estimate", params, est_seed, est_threads, timer.ms()),
           json{{"samples", coll.size()},
                {"coverage", frac},
                {"spread_estimate", n * frac},
                {"stderr", se},
                {"work", coll.total_work()}});
    } else if (*sel) {
      Timer timer;
      Instance inst = load_instance(sel_instance);
      SeedSelectionResult r = imm(inst, sel_k, sel_eps, sel_ell, sel_seed, sel_threads);
      json params{{"instance", sel_instance}, {"k", sel_k}, {"epsilon", sel_eps},
                  {"ell", sel_ell}};
      json par{{"eps_prime", r.params.eps_prime},
               {"alpha", r.params.alpha},
               {"beta_hat", r.params.beta_hat},
               {"gamma_hat", r.params.gamma_hat},
               {"ell_prime", r.params.ell_prime},
               {"lambda_prime", r.params.lambda_prime},
               {"lambda_star", r.params.lambda_star}};
      emit(manifest_json("select", params, sel_seed, sel_threads, timer.ms()),
           json{{"seeds", r.seeds},
                {"coverage", r.coverage},
                {"spread_estimate", r.spread_estimate},
                {"samples_used", r.samples_used},
                {"lb", r.lb},
                {"derived", par}});
    } else if (*cmp) {
      Timer timer;
      Instance inst = load_instance(cmp_instance);
      std::vector<std::vector<NodeId>> sets;
      for (const std::string& s : cmp_seed_sets) sets.push_back(parse_id_list(s, "--seeds"));
      DominanceReport rep = dominance_report(inst, sets, cmp_runs, cmp_seed, cmp_threads);
      json rows = json::array();
      std::string csv = "seeds,sigma_ic,sigma_sir,diff,joint_stderr,runs\n";
      for (std::size_t j = 0; j < rep.rows.size(); ++j) {
        const DominanceRow& row = rep.rows[j];
        rows.push_back(json{{"seeds", sets[j]},
                            {"sigma_ic", row.sigma_ic},
                            {"sigma_sir", row.sigma_sir},
                            {"diff", row.sigma_ic - row.sigma_sir},
                            {"joint_stderr", row.joint_stderr},
                            {"runs", row.runs}});
        std::string ids;
        for (NodeId v : sets[j]) ids += (ids.empty() ? "" : "|") + std::to_string(v);
        csv += ids + "," + std::to_string(row.sigma_ic) + "," + std::to_string(row.sigma_sir) +
               "," + std::to_string(row.sigma_ic - row.sigma_sir) + "," +
               std::to_string(row.joint_stderr) + "," + std::to_string(row.runs) + "\n";
      }
      if (!cmp_csv.empty()) write_text_file(cmp_csv, csv);
      json params{{"instance", cmp_instance}, {"seed_sets", cmp_seed_sets}, {"runs", cmp_runs}};
      emit(manifest_json("compare", params, cmp_seed, cmp_threads, timer.ms()),
           json{{"rows", rows},
                {"coupled_samples", rep.coupled_samples},
                {"violations", rep.containment_violations}});
    } else if (*cpl) {
      Timer timer;
      Instance inst = load_instance(cpl_instance);
      std::uint64_t violations = 0, sum_ic = 0, sum_sir = 0;
      for (std::uint64_t r = 0; r < cpl_runs; ++r) {
        Rng rng = Rng::stream(cpl_seed, r);
        CoupledOutcome o = coupled_rr(inst, cpl_root, rng);
        if (!std::includes(o.rr_ic.begin(), o.rr_ic.end(), o.rr_sir.begin(), o.rr_sir.end()))
          ++violations;
        sum_ic += o.rr_ic.size();
        sum_sir += o.rr_sir.size();
      }
      double runs = static_cast<double>(cpl_runs);
      json params{{"instance", cpl_instance}, {"root", cpl_root}, {"runs", cpl_runs}};
      emit(manifest_json("couple", params, cpl_seed, 1, timer.ms()),
           json{{"runs", cpl_runs},
                {"root", cpl_root},
                {"violations", violations},
                {"mean_rr_ic", cpl_runs ? static_cast<double>(sum_ic) / runs : 0.0},
                {"mean_rr_sir", cpl_runs ? static_cast<double>(sum_sir) / runs : 0.0}});
    } else if (*scan) {
      Timer timer;
      json rows = json::array();
      std::string csv = "b,beta,gamma,p_ic,p_sir,ratio\n";
      for (std::uint64_t b : scan_b)
        for (double beta : scan_beta)
          for (double gamma : scan_gamma) {
            GadgetProbs gp = gadget_infection_probs(b, beta, gamma);
            double ratio = gp.p_ic / gp.p_sir;
            rows.push_back(json{{"b", b}, {"beta", beta}, {"gamma", gamma},
                                {"p_ic", gp.p_ic}, {"p_sir", gp.p_sir}, {"ratio", ratio}});
            char line[160];
            std::snprintf(line, sizeof line, "%llu,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          static_cast<unsigned long long>(b), beta, gamma, gp.p_ic, gp.p_sir,
                          ratio);
            csv += line;
          }
      if (!scan_csv.empty()) write_text_file(scan_csv, csv);
      json params{{"b", scan_b}, {"beta", scan_beta}, {"gamma", scan_gamma}};
      emit(manifest_json("gadget-scan", params, 0, 1, timer.ms()), json{{"rows", rows}});
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
