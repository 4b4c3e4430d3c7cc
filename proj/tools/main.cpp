#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "spintail/io.hpp"

namespace {

using namespace spintail;

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  unsigned threads = 1;
  bool shift_to_psd = false;
};

std::string out_path(const Options& opt, const Json& cfg, const char* key,
                     const std::string& fallback) {
  std::string name = fallback;
  if (cfg.contains("outputs") && cfg["outputs"].contains(key))
    name = cfg["outputs"][key].get<std::string>();
  return (std::filesystem::path(opt.out_dir) / name).string();
}

std::uint64_t pick_seed(const Options& opt, const Json& cfg) {
  if (opt.seed_override) return *opt.seed_override;
  return cfg.value("seed", std::uint64_t{0});
}

Json task_params(const Json& cfg) {
  return cfg.contains("task_params") ? cfg["task_params"] : Json::object();
}

/// Builds the Hamiltonian named by the config: either a factory model
/// ("model" + "num_spins") or explicit geometry + term list.
LocalHamiltonian build_hamiltonian(const Json& cfg, const Options& opt,
                                   std::uint64_t seed) {
  if (!cfg.contains("hamiltonian"))
    throw ValidationError("config: missing 'hamiltonian'");
  const Json& hj = cfg["hamiltonian"];
  if (hj.contains("model")) {
    return standard_model(hj.at("model").get<std::string>(),
                          hj.at("num_spins").get<int>(), seed);
  }
  if (!cfg.contains("geometry"))
    throw ValidationError("config: explicit terms need a 'geometry'");
  const Geometry geo = parse_geometry(cfg["geometry"]);
  std::vector<LocalTerm> terms;
  for (const Json& tj : hj.at("terms")) {
    LocalTerm t = parse_term(tj);
    if (opt.shift_to_psd) t = shift_to_psd(t);
    terms.push_back(std::move(t));
  }
  if (geo.is_lattice) {
    return LocalHamiltonian::on_lattice(geo.lattice, geo.lattice.local_dim,
                                        std::move(terms));
  }
  const int d = hj.value("d", 2);
  return LocalHamiltonian::on_hypergraph(geo.hypergraph, d, std::move(terms));
}

void run_build(const Json& cfg, const Options& opt) {
  const std::uint64_t seed = pick_seed(opt, cfg);
  const LocalHamiltonian ham = build_hamiltonian(cfg, opt, seed);
  const Matrix H = assemble(ham);
  const std::string bin = out_path(opt, cfg, "binary", "hamiltonian.bin");
  write_matrix_binary(bin, H);
  Json summary{{"kind", ham.kind() == LocalHamiltonian::Kind::lattice
                            ? "lattice"
                            : "hypergraph"},
               {"num_spins", ham.num_spins()},
               {"num_terms", ham.num_terms()},
               {"local_dim", ham.local_dim()},
               {"total_dim", ham.total_dim()},
               // Just the filename: summaries must be byte-identical no
               // matter which output directory the run targeted.
               {"binary", std::filesystem::path(bin).filename().string()}};
  write_text(out_path(opt, cfg, "json", "build.json"), dump_json(summary));
}

ParsedState load_state(const Json& cfg, const LocalHamiltonian& ham,
                       const Matrix* assembled, std::uint64_t seed) {
  if (!cfg.contains("state")) throw ValidationError("config: missing 'state'");
  return parse_state(cfg["state"], ham.num_spins(), ham.local_dim(), assembled,
                     seed);
}

void run_distribution(const Json& cfg, const Options& opt) {
  const std::uint64_t seed = pick_seed(opt, cfg);
  const LocalHamiltonian ham = build_hamiltonian(cfg, opt, seed);
  const Matrix H = assemble(ham);
  const ParsedState st = load_state(cfg, ham, &H, seed);
  const double tol = task_params(cfg).value("cluster_tol", -1.0);
  EnergyDistribution dist = energy_distribution(st.density, H, tol);
  // Rows with exactly zero weight carry no mass and are omitted; the
  // cumulative columns are computed over the full level list first.
  const auto [geq, leq] = cumulative_weights(dist);
  std::string csv = "f,weight,cumulative_geq,cumulative_leq\n";
  for (std::size_t i = 0; i < dist.levels.size(); ++i) {
    if (dist.levels[i].weight == 0.0) continue;
    csv += format_g17(dist.levels[i].f) + "," +
           format_g17(dist.levels[i].weight) + "," + format_g17(geq[i]) + "," +
           format_g17(leq[i]) + "\n";
  }
  write_text(out_path(opt, cfg, "csv", "distribution.csv"), csv);
}

void run_moments(const Json& cfg, const Options& opt) {
  const std::uint64_t seed = pick_seed(opt, cfg);
  const LocalHamiltonian ham = build_hamiltonian(cfg, opt, seed);
  const Matrix H = assemble(ham);
  const ParsedState st = load_state(cfg, ham, &H, seed);
  const Json params = task_params(cfg);
  const int r_max = params.value("r_max", 8);
  const double tol = params.value("cluster_tol", -1.0);
  const MomentTable table = central_moments(st.density, H, r_max, tol);
  write_text(out_path(opt, cfg, "json", "moments.json"),
             dump_json(moment_table_json(table)));
}

void run_combi(const Json& cfg, const Options& opt) {
  if (!cfg.contains("geometry"))
    throw ValidationError("config: combi needs a 'geometry'");
  const Geometry geo = parse_geometry(cfg["geometry"]);
  const Json params = task_params(cfg);
  const int r = params.at("r").get<int>();
  Json result;
  if (geo.is_lattice) {
    const long long l = params.at("l").get<long long>();
    const std::uint64_t count = count_P_tuples(geo.lattice, r, l, opt.threads);
    const BigInt bound =
        bound_P(geo.lattice.interaction_count(), r, l, geo.lattice.dim);
    result = Json{{"n", geo.lattice.interaction_count()},
                  {"r", r},
                  {"l", l},
                  {"count", count},
                  {"bound", big_to_json(bound)},
                  {"ratio", static_cast<double>(count) / bound.convert_to<double>()}};
  } else {
    const auto& h = geo.hypergraph;
    const std::uint64_t count = count_Q_tuples(h, r, opt.threads);
    const BigInt bound = bound_Q(h.num_terms(), r, h.max_neighbors());
    result = Json{{"n", h.num_terms()},
                  {"r", r},
                  {"m", h.max_neighbors()},
                  {"count", count},
                  {"bound", big_to_json(bound)},
                  {"ratio", static_cast<double>(count) / bound.convert_to<double>()}};
  }
  write_text(out_path(opt, cfg, "json", "combi.json"), dump_json(result));
}

void run_certify(const Json& cfg, const Options& opt) {
  const std::uint64_t seed = pick_seed(opt, cfg);
  const LocalHamiltonian ham = build_hamiltonian(cfg, opt, seed);
  if (ham.kind() != LocalHamiltonian::Kind::lattice)
    throw ValidationError("certify: needs lattice geometry");
  const Matrix H = assemble(ham);
  const ParsedState st = load_state(cfg, ham, &H, seed);
  const Json params = task_params(cfg);
  const double C = params.at("C").get<double>();
  const long long l0 = params.at("l0").get<long long>();
  const double sigma = params.at("sigma").get<double>();
  const std::string probes = params.value("probe_class", "single-site-basis");
  const DecayCheck check =
      certify_decay(st.density, ham.lattice(), C, l0, sigma, probes);
  const DecayFit fit = fit_decay_slope(check.max_cov_by_distance);
  write_text(out_path(opt, cfg, "json", "certificate.json"),
             dump_json(decay_check_json(check, fit)));
}

void run_verify(const Json& cfg, const Options& opt) {
  const std::uint64_t seed = pick_seed(opt, cfg);
  const LocalHamiltonian ham = build_hamiltonian(cfg, opt, seed);
  const Matrix H = assemble(ham);
  const ParsedState st = load_state(cfg, ham, &H, seed);
  const Json params = task_params(cfg);
  SweepConfig sweep;
  sweep.theorem_id = params.at("theorem_id").get<std::string>();
  sweep.grid = params.at("grid").get<std::vector<double>>();
  sweep.cluster_tol = params.value("cluster_tol", -1.0);
  Json extra = Json::object();
  const bool is_decay = sweep.theorem_id == "lemma-4.1" ||
                        sweep.theorem_id == "theorem-4.2-gaussian" ||
                        sweep.theorem_id == "theorem-4.2-stretched";
  if (is_decay) {
    if (ham.kind() != LocalHamiltonian::Kind::lattice)
      throw ValidationError("verify: '" + sweep.theorem_id +
                            "' needs lattice geometry");
    sweep.C = params.at("C").get<double>();
    sweep.l0 = params.at("l0").get<long long>();
    sweep.sigma = params.at("sigma").get<double>();
    const std::string probes = params.value("probe_class", "single-site-basis");
    const DecayCheck check = certify_decay(st.density, ham.lattice(), sweep.C,
                                           sweep.l0, sweep.sigma, probes);
    if (!check.holds) {
      throw ValidationError(
          "verify: decay certificate does not hold (worst pair " +
          check.worst_pair + " at distance " +
          std::to_string(check.worst_distance) + ")");
    }
    sweep.has_certificate = true;
    extra["certificate"] =
        decay_check_json(check, fit_decay_slope(check.max_cov_by_distance));
    // The moment argument only invokes the certificate at separations of at
    // least l0, splitting the tuple sum at l0 + 2Dk; record that threshold.
    extra["certificate"]["applicability_split"] =
        sweep.l0 + 2LL * ham.lattice().dim * ham.lattice().halfwidth;
  }
  const std::vector<BoundReport> reports = verify_sweep(st.density, ham, sweep);
  Json arr = Json::array();
  for (const auto& rep : reports) arr.push_back(bound_report_json(rep));
  Json out{{"theorem_id", sweep.theorem_id}, {"reports", arr}};
  for (auto& [k, v] : extra.items()) out[k] = v;
  write_text(out_path(opt, cfg, "json", "verify.json"), dump_json(out));
  write_text(out_path(opt, cfg, "csv", "verify.csv"), verify_csv(reports));
}

int run(const std::string& task, const Options& opt) {
  const Json cfg = load_json_file(opt.config_path);
  if (cfg.contains("task") && cfg["task"].get<std::string>() != task)
    throw ValidationError("config task '" + cfg["task"].get<std::string>() +
                          "' does not match subcommand '" + task + "'");
  std::filesystem::create_directories(opt.out_dir);
  if (task == "build") run_build(cfg, opt);
  else if (task == "distribution") run_distribution(cfg, opt);
  else if (task == "moments") run_moments(cfg, opt);
  else if (task == "combi") run_combi(cfg, opt);
  else if (task == "certify") run_certify(cfg, opt);
  else if (task == "verify") run_verify(cfg, opt);
  else throw ValidationError("unknown task '" + task + "'");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"energy-tail bound construction and verification for spin systems"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::string> tasks = {"build",  "distribution", "moments",
                                          "combi",  "certify",      "verify"};
  for (const auto& t : tasks) {
    CLI::App* sub = app.add_subcommand(t);
    sub->add_option("--config", opt.config_path, "experiment config JSON")
        ->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&opt](const std::uint64_t& s) { opt.seed_override = s; },
        "seed override");
    sub->add_option("--threads", opt.threads, "worker cap for enumerations");
    sub->add_flag("--shift-to-psd", opt.shift_to_psd,
                  "rescale explicit terms via h -> (h + |h| I) / (2 |h|)");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string task = app.get_subcommands().front()->get_name();
  try {
    return run(task, opt);
  } catch (const TheoremViolation& e) {
    std::cerr << "theorem violation: " << e.what() << "\n";
    return 3;
  } catch (const ConsistencyError& e) {
    std::cerr << "consistency failure: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
