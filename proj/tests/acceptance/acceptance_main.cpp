// Acceptance suite: runs every criterion end to end at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero if any fail.
//
// Criteria that need trained languages share two checkpoints trained once at
// the default configuration. Set SEMEQ_ACCEPT_OUT to keep (and reuse) the
// work directory across runs; by default a fresh temporary directory is used
// and everything is trained from scratch.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <vector>

#include "semeq/channel.hpp"
#include "semeq/config.hpp"
#include "semeq/csv.hpp"
#include "semeq/equalizer.hpp"
#include "semeq/gridworld.hpp"
#include "semeq/language.hpp"
#include "semeq/mlp.hpp"
#include "semeq/partition.hpp"
#include "semeq/rng.hpp"
#include "semeq/serialize.hpp"
#include "semeq/sweep.hpp"

namespace fs = std::filesystem;
using namespace semeq;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  std::cout << (pass ? "PASS" : "FAIL") << "  " << name << "  [" << detail << "]" << std::endl;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------------------
// Criterion 1: gradient correctness on randomized small networks.

void criterion_gradients() {
  const auto start = Clock::now();
  Rng rng(20240601);
  int checked = 0;
  double worst = 0.0;
  for (int net_index = 0; net_index < 50; ++net_index) {
    const int depth = 2 + static_cast<int>(uniform_below(rng, 2));
    std::vector<int> dims;
    dims.push_back(2 + static_cast<int>(uniform_below(rng, 4)));
    for (int l = 0; l < depth; ++l) dims.push_back(2 + static_cast<int>(uniform_below(rng, 6)));
    std::vector<Activation> acts(dims.size() - 1, Activation::ReLU);
    acts.back() = Activation::Identity;
    Mlp net(dims, acts, rng);

    Eigen::VectorXd input(net.input_dim());
    for (int i = 0; i < input.size(); ++i) input(i) = 2.0 * uniform01(rng) - 1.0;
    Eigen::VectorXd output_grad(net.output_dim());
    for (int i = 0; i < output_grad.size(); ++i) output_grad(i) = 2.0 * uniform01(rng) - 1.0;

    const Mlp::Gradients grads = net.backward(input, output_grad);
    constexpr double kStep = 1e-5;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      Layer& layer = net.layers()[l];
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
          const double saved = layer.weight(r, c);
          layer.weight(r, c) = saved + kStep;
          const double plus = output_grad.dot(net.forward(input));
          layer.weight(r, c) = saved - kStep;
          const double minus = output_grad.dot(net.forward(input));
          layer.weight(r, c) = saved;
          const double numeric = (plus - minus) / (2.0 * kStep);
          const double analytic = grads.weight[l](r, c);
          const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
          worst = std::max(worst, std::abs(numeric - analytic) / scale);
          ++checked;
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  report("1 gradient-correctness", worst <= 1e-4 && elapsed < 10.0,
         "50 nets, " + std::to_string(checked) + " partials, worst rel err " + fmt(worst) + ", " +
             fmt(elapsed) + " s");
}

// ---------------------------------------------------------------------------
// Shared trained-language fixture.

struct Fixture {
  ExperimentConfig config;
  Language source;
  Language target;
  std::vector<Observation> states;
};

Fixture train_fixture(const fs::path& out_dir) {
  Fixture fx;
  fx.config = parse_experiment_config("{}");
  fx.states = enumerate_states(fx.config.grid);

  const auto train_role = [&](const std::string& role) {
    const fs::path path = out_dir / ("checkpoint_" + role + ".json");
    if (fs::exists(path)) {
      std::cout << "  (reusing " << path << ")\n";
      return load_checkpoint(path).language;
    }
    const auto start = Clock::now();
    const Language lang =
        train_language(fx.config.grid, fx.config.dqn, fx.config.channel,
                       derive_seed(fx.config.master_seed, "train/" + role),
                       fx.config.normalization);
    std::cout << "  trained " << role << " in " << fmt(seconds_since(start)) << " s\n";
    save_checkpoint(path, lang, {role, config_hash(fx.config)});
    return lang;
  };
  fx.source = train_role("source");
  fx.target = train_role("target");
  return fx;
}

// Criterion 2: trained-language competence and transmit power.

void criterion_competence(const Fixture& fx) {
  bool pass = true;
  std::string detail;
  const struct {
    const char* role;
    const Language* lang;
  } entries[] = {{"source", &fx.source}, {"target", &fx.target}};
  for (const auto& entry : entries) {
    const double success = evaluate_language(
        *entry.lang, fx.config.grid, fx.config.channel, 1000,
        derive_seed(fx.config.master_seed, std::string("accept/eval/") + entry.role));
    const double power = average_transmit_power(*entry.lang, fx.config.grid);
    pass = pass && success >= 0.95 && power >= 0.8 && power <= 1.2;
    if (!detail.empty()) detail += "; ";
    detail += std::string(entry.role) + " success " + fmt(success) + ", power " + fmt(power);
  }
  report("2 trained-language-competence", pass, detail);
}

// Criterion 3: the identity (mismatch) baseline drops significantly below
// the matched baseline at the training SNR.

struct SeedStats {
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 * sd / sqrt(n)
};

SeedStats seed_stats(const std::vector<double>& values) {
  SeedStats stats;
  const double n = static_cast<double>(values.size());
  for (double v : values) stats.mean += v;
  stats.mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - stats.mean) * (v - stats.mean);
  var /= (n - 1.0);
  stats.half_width = 1.959963984540054 * std::sqrt(var / n);
  return stats;
}

void criterion_mismatch_drop(const Fixture& fx) {
  const ChannelConfig channel{fx.config.channel.snr_db};
  std::vector<double> matched_rates, identity_rates;
  for (std::uint64_t seed : fx.config.sweep.seeds) {
    Rng rng_m = make_rng(fx.config.master_seed, "accept/mismatch/matched/" + std::to_string(seed));
    Rng rng_i =
        make_rng(fx.config.master_seed, "accept/mismatch/identity/" + std::to_string(seed));
    int matched_ok = 0, identity_ok = 0;
    for (int e = 0; e < 1000; ++e) {
      matched_ok +=
          matched_episode(fx.target, fx.config.grid, channel, fx.config.dqn.gamma, rng_m).success;
      identity_ok += equalized_episode(fx.source, fx.target, nullptr, nullptr, nullptr,
                                       SelectionPolicy::Identity, fx.config.grid, channel,
                                       fx.config.dqn.gamma, rng_i)
                         .success;
    }
    matched_rates.push_back(matched_ok / 1000.0);
    identity_rates.push_back(identity_ok / 1000.0);
  }
  const SeedStats matched = seed_stats(matched_rates);
  const SeedStats identity = seed_stats(identity_rates);
  const bool separated = identity.mean + identity.half_width < matched.mean - matched.half_width;
  report("3 mismatch-drop", separated,
         "matched " + fmt(matched.mean) + "+-" + fmt(matched.half_width) + " vs identity " +
             fmt(identity.mean) + "+-" + fmt(identity.half_width) + " over " +
             std::to_string(matched_rates.size()) + " seeds");
}

// Criterion 4: soft-8 label structure and ambiguity coverage; soft-4 has no
// singleton atoms.

void criterion_ambiguity(const Fixture& fx, const Partition& soft8, const Partition& soft4) {
  int singles = 0, pairs = 0, other = 0;
  for (const Atom& atom : soft8.atoms) {
    if (atom.action_labels.size() == 1) {
      ++singles;
    } else if (atom.action_labels.size() == 2) {
      ++pairs;
    } else {
      ++other;
    }
  }

  int ambiguous_total = 0, ambiguous_in_pairs = 0;
  for (const Atom& atom : soft8.atoms) {
    const bool pair_atom = atom.action_labels.size() == 2;
    for (int idx : atom.state_indices) {
      if (optimal_action_set(fx.states[idx]).size() == 2) {
        ++ambiguous_total;
        if (pair_atom) ++ambiguous_in_pairs;
      }
    }
  }
  const double coverage =
      ambiguous_total > 0 ? static_cast<double>(ambiguous_in_pairs) / ambiguous_total : 0.0;

  int soft4_singles = 0;
  for (const Atom& atom : soft4.atoms) {
    if (atom.action_labels.size() == 1) ++soft4_singles;
  }

  const bool pass =
      singles == 4 && pairs == 4 && other == 0 && coverage >= 0.9 && soft4_singles == 0;
  report("4 ambiguity-structure", pass,
         "soft8 labels " + std::to_string(singles) + " single/" + std::to_string(pairs) +
             " pair/" + std::to_string(other) + " other, pair coverage " + fmt(coverage) +
             ", soft4 singletons " + std::to_string(soft4_singles));
}

// Criterion 5: soft-8 atoms are at least as regular as hard atoms under the
// 5-nearest-neighbor same-atom statistic.

void criterion_regularity(const Partition& hard, const Partition& soft8) {
  const double hard_score = knn_same_atom_fraction(hard, 5);
  const double soft_score = knn_same_atom_fraction(soft8, 5);
  report("5 regularity", soft_score >= hard_score,
         "soft8 " + fmt(soft_score) + " vs hard " + fmt(hard_score));
}

// Criterion 6: equalization ordering over the SNR sweep.

void criterion_ordering(const Fixture& fx, const fs::path& out_dir) {
  ExperimentConfig sweep_config = fx.config;
  sweep_config.sweep.snr_grid_db = {5.0, 10.0, 15.0, 20.0};
  sweep_config.sweep.policies = {SweepPolicy::Semantic, SweepPolicy::Effectiveness};
  const auto start = Clock::now();
  const SweepReport report_data =
      run_sweep(sweep_config, fx.source, fx.target, 1, out_dir / "cells");
  write_sweep_report_csv(out_dir / "ordering_sweep_report.csv", report_data);
  const auto assertions = ordering_check(report_data);
  write_ordering_csv(out_dir / "ordering_check.csv", assertions, report_data.config_hash);
  bool pass = true;
  int failed = 0;
  for (const OrderingAssertion& a : assertions) {
    if (!a.pass) {
      ++failed;
      pass = false;
      std::cout << "  ordering miss: " << a.policy << " @ " << fmt(a.snr_db) << " dB "
                << a.relation << " (" << fmt(a.lhs) << " vs " << fmt(a.rhs) << ")\n";
    }
  }
  report("6 equalization-ordering", pass,
         std::to_string(assertions.size() - failed) + "/" + std::to_string(assertions.size()) +
             " assertions over " + std::to_string(report_data.cells.size()) + " cells, " +
             fmt(seconds_since(start)) + " s");
}

// ---------------------------------------------------------------------------
// Criterion 7: transfer estimates against exact enumeration and the Gaussian
// orthant probability.

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

Atom atom_from_symbols(int id, const std::vector<Symbol>& symbols) {
  Atom atom;
  atom.id = id;
  atom.symbols = symbols;
  Symbol mean = Symbol::Zero();
  for (const Symbol& s : symbols) mean += s;
  mean /= static_cast<double>(symbols.size());
  atom.semantic_mean = mean;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const Symbol& s : symbols) {
    const Symbol d = s - mean;
    cov += d * d.transpose();
  }
  if (symbols.size() >= 2) cov /= static_cast<double>(symbols.size() - 1);
  atom.semantic_cov = cov;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    atom.state_indices.push_back(static_cast<int>(i));
    atom.q_vectors.push_back(ActionValues::Zero());
  }
  return atom;
}

void criterion_transfer_oracle() {
  // Half-plane target: a hard two-atom partition whose classifier reduces to
  // the sign of the first symbol coordinate.
  Language split_lang;
  split_lang.grid_width = 2;
  split_lang.grid_height = 2;
  split_lang.power_norm = 1.0;
  split_lang.power_norm_ready = true;
  Eigen::MatrixXd dec(4, 2);
  dec << 1, 0, -1, 0, 0, 0, 0, 0;
  Eigen::VectorXd bias(4);
  bias << 0, 0, -100, -100;
  {
    Layer layer{dec, bias, Activation::Identity};
    split_lang.decoder = Mlp::from_layers({layer});
    Layer enc{Eigen::MatrixXd::Zero(2, 8), Eigen::VectorXd::Zero(2), Activation::Identity};
    split_lang.encoder = Mlp::from_layers({enc});
  }
  Partition half_plane;
  half_plane.kind = PartitionKind::Hard;
  half_plane.atoms.push_back(atom_from_symbols(0, {{1, 0}, {1, 1}, {2, 0}}));
  half_plane.atoms[0].action_labels = {Action::Right};
  half_plane.atoms.push_back(atom_from_symbols(1, {{-1, 0}, {-1, 1}, {-2, 0}}));
  half_plane.atoms[1].action_labels = {Action::Down};

  // Exact enumeration on a 4-point atom: 3 of 4 points positive.
  const Atom four = atom_from_symbols(0, {{0.5, 0.0}, {1.5, 1.0}, {0.25, -2.0}, {-1.0, 0.5}});
  const double enumerated =
      estimate_transfer(AffineMap::identity(), four, 0, half_plane, split_lang);
  const bool exact_ok = enumerated == 0.75;

  // Monte-Carlo vs closed-form orthant probability for Gaussian support.
  Rng rng(31337);
  const Symbol mean(0.3, -0.1);
  Eigen::Matrix2d sqrt_cov;
  sqrt_cov << 0.9, 0.2, 0.0, 0.7;
  std::vector<Symbol> samples;
  samples.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    const auto [a, b] = gaussian_pair(rng);
    samples.push_back(mean + sqrt_cov * Symbol(a, b));
  }
  const Atom gaussian_support = atom_from_symbols(0, samples);

  bool mc_ok = true;
  double worst_gap = 0.0;
  AffineMap tilt;
  tilt.linear << 1.2, 0.3, -0.1, 0.8;
  tilt.offset = Symbol(-0.2, 0.4);
  const Eigen::Matrix2d cov = sqrt_cov * sqrt_cov.transpose();
  for (const AffineMap& map : {AffineMap::identity(), tilt}) {
    const Symbol pushed_mean = map(mean);
    const Eigen::Matrix2d pushed_cov = map.linear * cov * map.linear.transpose();
    const double analytic = standard_normal_cdf(pushed_mean.x() / std::sqrt(pushed_cov(0, 0)));
    const double estimated = estimate_transfer(map, gaussian_support, 0, half_plane, split_lang);
    worst_gap = std::max(worst_gap, std::abs(analytic - estimated));
    mc_ok = mc_ok && std::abs(analytic - estimated) <= 0.01;
  }
  report("7 transfer-oracle", exact_ok && mc_ok,
         "4-point enumeration " + fmt(enumerated) + ", MC worst gap " + fmt(worst_gap) +
             " at 1e5 samples");
}

// Criterion 8: Gaussian optimal-transport pushforward moments.

void criterion_transport_map() {
  Rng rng(90210);
  const Symbol source_mean(0.5, -1.0);
  Eigen::Matrix2d source_sqrt;
  source_sqrt << 1.1, 0.4, 0.0, 0.6;
  std::vector<Symbol> samples;
  samples.reserve(200000);
  for (int i = 0; i < 200000; ++i) {
    const auto [a, b] = gaussian_pair(rng);
    samples.push_back(source_mean + source_sqrt * Symbol(a, b));
  }
  Atom source = atom_from_symbols(0, samples);

  Atom target = atom_from_symbols(1, {{0, 0}, {1, 0}, {0, 1}});
  target.semantic_mean = Symbol(-2.0, 3.0);
  target.semantic_cov << 0.9, -0.3, -0.3, 1.4;

  const AffineMap map = fit_atom_map(source, target);
  Symbol pushed_mean = Symbol::Zero();
  for (const Symbol& s : samples) pushed_mean += map(s);
  pushed_mean /= static_cast<double>(samples.size());
  Eigen::Matrix2d pushed_cov = Eigen::Matrix2d::Zero();
  for (const Symbol& s : samples) {
    const Symbol d = map(s) - pushed_mean;
    pushed_cov += d * d.transpose();
  }
  pushed_cov /= static_cast<double>(samples.size() - 1);

  const double mean_err = (pushed_mean - target.semantic_mean).norm();
  const double cov_err = (pushed_cov - target.semantic_cov).norm() / target.semantic_cov.norm();

  // Identity and pure translation pairs must be exact to 1e-9.
  const AffineMap self_map = fit_atom_map(source, source);
  const double identity_err =
      (self_map.linear - Eigen::Matrix2d::Identity()).norm() + self_map.offset.norm();
  Atom shifted = source;
  shifted.semantic_mean += Symbol(3.0, -2.0);
  const AffineMap shift_map = fit_atom_map(source, shifted);
  const double translation_err = (shift_map.linear - Eigen::Matrix2d::Identity()).norm() +
                                 (shift_map.offset - Symbol(3.0, -2.0)).norm();

  const bool pass =
      mean_err <= 1e-6 && cov_err <= 1e-3 && identity_err <= 1e-9 && translation_err <= 1e-9;
  report("8 gaussian-transport-map", pass,
         "mean err " + fmt(mean_err) + ", cov rel err " + fmt(cov_err) + ", identity " +
             fmt(identity_err) + ", translation " + fmt(translation_err));
}

// Criterion 9: policy selection equals brute-force score enumeration.

void criterion_policy_oracle() {
  Rng rng(60601);
  bool pass = true;
  int trials = 0;
  for (int cb_index = 0; cb_index < 50 && pass; ++cb_index) {
    TransformCodebook cb;
    cb.source_atoms = 2 + static_cast<int>(uniform_below(rng, 7));
    cb.target_atoms = 2 + static_cast<int>(uniform_below(rng, 7));
    cb.maps.resize(static_cast<std::size_t>(cb.source_atoms) * cb.target_atoms);
    cb.transfer.resize(static_cast<std::size_t>(cb.source_atoms) * cb.target_atoms *
                       cb.target_atoms);
    for (double& t : cb.transfer) t = uniform01(rng);
    cb.correspondence.resize(cb.source_atoms);
    for (int p = 0; p < cb.source_atoms; ++p) {
      cb.correspondence[p] = static_cast<int>(uniform_below(rng, cb.target_atoms));
    }
    for (int input = 0; input < 20; ++input) {
      Eigen::VectorXd weights(cb.source_atoms);
      for (int i = 0; i < weights.size(); ++i) weights(i) = uniform01(rng) + 1e-6;
      weights /= weights.sum();
      Eigen::VectorXd values(cb.target_atoms);
      for (int i = 0; i < values.size(); ++i) values(i) = 2.0 * uniform01(rng) - 1.0;

      int best_sem = -1, best_eff = -1;
      double best_sem_score = -std::numeric_limits<double>::infinity();
      double best_eff_score = -std::numeric_limits<double>::infinity();
      for (int index = 0; index < cb.map_count(); ++index) {
        const int p = index / cb.target_atoms;
        const int q = index % cb.target_atoms;
        const double sem_score = weights(p) * cb.transfer_at(p, q, cb.correspondence[p]);
        if (sem_score > best_sem_score) {
          best_sem_score = sem_score;
          best_sem = index;
        }
        double carried = 0.0;
        for (int j = 0; j < cb.target_atoms; ++j) {
          carried += cb.transfer_at(p, q, j) * values(j);
        }
        const double eff_score = weights(p) * carried;
        if (eff_score > best_eff_score) {
          best_eff_score = eff_score;
          best_eff = index;
        }
      }
      pass = pass && select_map_semantic(cb, weights) == best_sem &&
             select_map_effectiveness(cb, weights, values) == best_eff;
      ++trials;
    }
  }
  report("9 policy-oracle", pass, std::to_string(trials) + " random inputs over random codebooks");
}

// ---------------------------------------------------------------------------
// Criterion 10: rerunning the full pipeline reproduces every output file.

std::uint64_t file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return fnv1a64(buffer.str());
}

void criterion_determinism(const fs::path& work_dir) {
  const char* cli_env = std::getenv("SEMEQ_CLI");
  if (cli_env == nullptr || *cli_env == '\0') {
    report("10 determinism", false, "SEMEQ_CLI is not set; cannot drive the pipeline");
    return;
  }
  const std::string cli = cli_env;

  const auto run_pipeline = [&](const fs::path& out) -> bool {
    fs::remove_all(out);
    fs::create_directories(out);
    const fs::path config_path = out / "config.json";
    {
      std::ofstream cfg(config_path);
      cfg << R"({
        "master_seed": 20240601,
        "output_dir": ")"
          << out.string() << R"(",
        "grid": {"width": 3, "height": 3, "max_steps": 60},
        "dqn": {"episodes": 200, "epsilon_decay_steps": 1500, "replay_capacity": 5000},
        "partition": {"n_c_list": [4]},
        "sweep": {
          "snr_grid_db": [5.0],
          "n_episodes": 50,
          "seeds": [0],
          "partitions": [{"kind": "hard"}, {"kind": "soft", "n_c": 4}],
          "policies": ["sem", "identity", "matched"]
        }
      })";
    }
    const std::vector<std::string> commands = {
        cli + " train -c " + config_path.string() + " --role source",
        cli + " train -c " + config_path.string() + " --role target",
        cli + " partition -c " + config_path.string() + " --checkpoint " +
            (out / "checkpoint_source.json").string() + " --kind soft --n-c 4",
        cli + " partition -c " + config_path.string() + " --checkpoint " +
            (out / "checkpoint_target.json").string() + " --kind soft --n-c 4",
        cli + " codebook -c " + config_path.string() + " --source-partition " +
            (out / "partition_source_soft4.json").string() + " --target-partition " +
            (out / "partition_target_soft4.json").string() + " --source-checkpoint " +
            (out / "checkpoint_source.json").string() + " --target-checkpoint " +
            (out / "checkpoint_target.json").string(),
        cli + " sweep -c " + config_path.string(),
    };
    for (const std::string& command : commands) {
      const std::string silenced = command + " >/dev/null 2>&1";
      if (std::system(silenced.c_str()) != 0) return false;
    }
    return true;
  };

  const fs::path dir_a = work_dir / "determinism_a";
  const fs::path dir_b = work_dir / "determinism_b";
  if (!run_pipeline(dir_a) || !run_pipeline(dir_b)) {
    report("10 determinism", false, "pipeline command failed");
    return;
  }

  int compared = 0;
  int mismatched = 0;
  std::string first_mismatch;
  for (const auto& entry : fs::recursive_directory_iterator(dir_a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path relative = fs::relative(entry.path(), dir_a);
    if (relative == "config.json") continue;  // embeds the run directory path
    const fs::path other = dir_b / relative;
    ++compared;
    if (!fs::exists(other) || file_hash(entry.path()) != file_hash(other)) {
      ++mismatched;
      if (first_mismatch.empty()) first_mismatch = relative.string();
    }
  }
  report("10 determinism", compared > 0 && mismatched == 0,
         std::to_string(compared) + " files compared" +
             (mismatched > 0 ? ", first mismatch " + first_mismatch : ""));
}

// ---------------------------------------------------------------------------
// Supplementary trained-language invariants (also gating).

void invariant_top2_gap(const Fixture& fx) {
  // For states with two optimal actions, the two leading action values at
  // the noiseless symbol should sit closer to each other than to the rest.
  int ambiguous = 0, structured = 0;
  for (const Observation& obs : fx.states) {
    if (optimal_action_set(obs).size() != 2) continue;
    ++ambiguous;
    const ActionValues q = action_values(fx.source, encode(fx.source, obs));
    std::vector<double> sorted(q.data(), q.data() + 4);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    if (sorted[0] - sorted[1] < sorted[1] - sorted[3]) ++structured;
  }
  const double fraction = static_cast<double>(structured) / ambiguous;
  report("inv top2-gap-structure", fraction >= 0.8,
         fmt(fraction) + " of " + std::to_string(ambiguous) + " two-action states");
}

void invariant_self_equalization(const Fixture& fx, const Partition& soft8_source) {
  const ChannelConfig channel{fx.config.channel.snr_db};
  const TransformCodebook cb =
      build_codebook(fx.source, soft8_source, fx.source, soft8_source, {},
                     derive_seed(fx.config.master_seed, "accept/selfcb"));
  Rng rng_m = make_rng(fx.config.master_seed, "accept/self/matched");
  Rng rng_s = make_rng(fx.config.master_seed, "accept/self/sem");
  int matched_ok = 0, self_ok = 0;
  for (int e = 0; e < 1000; ++e) {
    matched_ok +=
        matched_episode(fx.source, fx.config.grid, channel, fx.config.dqn.gamma, rng_m).success;
    self_ok += equalized_episode(fx.source, fx.source, &soft8_source, &soft8_source, &cb,
                                 SelectionPolicy::Semantic, fx.config.grid, channel,
                                 fx.config.dqn.gamma, rng_s)
                   .success;
  }
  const double ratio = matched_ok > 0 ? static_cast<double>(self_ok) / matched_ok : 0.0;
  report("inv self-equalization", ratio >= 0.95,
         "self " + std::to_string(self_ok) + " vs matched " + std::to_string(matched_ok) +
             " per 1000");
}

void invariant_matched_monotonic(const Fixture& fx) {
  // Success under the matched baseline should not degrade as SNR improves,
  // within twice the normal-approximation half width.
  bool pass = true;
  double previous = -1.0, previous_hw = 0.0;
  std::string curve;
  for (double snr : fx.config.sweep.snr_grid_db) {
    int ok = 0;
    const int n = 1000;
    Rng rng = make_rng(fx.config.master_seed, "accept/mono/" + format_double(snr));
    for (int e = 0; e < n; ++e) {
      ok += matched_episode(fx.target, fx.config.grid, {snr}, fx.config.dqn.gamma, rng).success;
    }
    const double rate = static_cast<double>(ok) / n;
    const double hw = 1.959963984540054 * std::sqrt(rate * (1.0 - rate) / n);
    if (previous >= 0.0 && rate < previous - 2.0 * (hw + previous_hw)) pass = false;
    previous = rate;
    previous_hw = hw;
    if (!curve.empty()) curve += " ";
    curve += fmt(rate);
  }
  report("inv matched-monotonic", pass, curve);
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out_dir;
  if (const char* env = std::getenv("SEMEQ_ACCEPT_OUT"); env != nullptr && *env != '\0') {
    out_dir = env;
  } else if (argc > 1) {
    out_dir = argv[1];
  } else {
    out_dir = fs::temp_directory_path() / "semeq_acceptance";
  }
  fs::create_directories(out_dir);
  std::cout << "acceptance work directory: " << out_dir << "\n";

  criterion_gradients();

  std::cout << "training fixture languages (5x5 grid, training SNR 5 dB)...\n";
  const Fixture fx = train_fixture(out_dir);

  const Partition hard_source =
      build_hard_partition(fx.source, fx.states, fx.config.partition.ambiguity_epsilon);
  const auto build_soft = [&](int n_c) {
    return build_soft_partition(
        fx.source, fx.states, n_c,
        derive_seed(fx.config.master_seed, "partition/source/soft/" + std::to_string(n_c)),
        fx.config.partition.ambiguity_epsilon, fx.config.partition.kmeans_restarts);
  };
  const Partition soft4_source = build_soft(4);
  const Partition soft8_source = build_soft(8);

  criterion_competence(fx);
  criterion_mismatch_drop(fx);
  criterion_ambiguity(fx, soft8_source, soft4_source);
  criterion_regularity(hard_source, soft8_source);
  criterion_ordering(fx, out_dir);
  criterion_transfer_oracle();
  criterion_transport_map();
  criterion_policy_oracle();
  criterion_determinism(out_dir);

  invariant_top2_gap(fx);
  invariant_self_equalization(fx, soft8_source);
  invariant_matched_monotonic(fx);

  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                : std::to_string(g_failures) + " FAILURES")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
