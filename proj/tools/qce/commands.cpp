// SPDX-License-Identifier: Apache-2.0
//
// qce - channel estimation for coarsely quantized MIMO receivers
// Copyright (C) 2026 The qce authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "qce/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include "qce/eval.hpp"
#include "qce/io.hpp"
#include "qce/log.hpp"
#include "qce/parallel.hpp"
#include "qce/quantized_learning.hpp"

namespace qce::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Substream indices below the root seed; the sweep uses 1 and 2.
constexpr std::uint64_t kTrainChannels = 10;
constexpr std::uint64_t kTrainNoise = 11;
constexpr std::uint64_t kTraining = 12;
constexpr std::uint64_t kRecovery = 13;

std::string bits_tag(int bits) { return bits == 0 ? "inf" : std::to_string(bits); }

std::string snr_tag(double snr) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", snr);
  return buf;
}

std::string in_dir(const RunConfig& c, const std::string& name) { return (fs::path(c.out_dir) / name).string(); }

void ensure_dir(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + c.out_dir + "': " + ec.message());
}

double sigma2_of(double snr) { return snr_db_to_sigma2(snr); }

QuantizerSpec quantizer_of(int bits, double sigma2) {
  return bits == 0 ? QuantizerSpec::infinite() : make_quantizer(bits, sigma2);
}

ChannelDataset training_channels(const RunConfig& c) {
  const std::string path = train_channels_path(c);
  if (fs::exists(path)) {
    ChannelDataset d = read_channels(path);
    if (d.antennas() != c.scenario.antennas) throw IoError("'" + path + "' does not match scenario.antennas");
    return d;
  }
  log_info("generating " + std::to_string(c.train_size) + " training channels in memory");
  return build_dataset_H(c.scenario, c.train_size, Rng(c.seed).substream(kTrainChannels));
}

void print_progress(const EpochRecord& r) {
  std::fprintf(stderr, "epoch %zu train %.6g val %.6g\n", r.epoch, r.train_loss, r.val_loss);
}

}  // namespace

std::string train_channels_path(const RunConfig& c) { return in_dir(c, "train_H.qce"); }

std::string train_observations_path(const RunConfig& c, int bits, double snr_db) {
  return in_dir(c, "train_R_b" + bits_tag(bits) + "_snr" + snr_tag(snr_db) + ".qce");
}

std::string default_model_path(const RunConfig& c, const std::string& estimator, int bits, double snr_db) {
  const std::string cell = "_b" + bits_tag(bits) + "_snr" + snr_tag(snr_db);
  if (estimator == "bgmm") return in_dir(c, c.training == "R" ? "gmm_R" + cell + ".qcm" : "gmm_H.qcm");
  if (estimator == "bmfa") return in_dir(c, "mfa_H.qcm");
  if (estimator == "bvae") {
    return in_dir(c, c.training == "R" ? "vae_R" + cell + ".qcv" : "vae_H_b" + bits_tag(bits) + ".qcv");
  }
  if (estimator == "dnn") return in_dir(c, "dnn_b" + bits_tag(bits) + ".qcv");
  throw std::invalid_argument("estimator '" + estimator + "' has no model file");
}

void cmd_generate(const RunConfig& c) {
  ensure_dir(c);
  const ChannelDataset h = build_dataset_H(c.scenario, c.train_size, Rng(c.seed).substream(kTrainChannels));
  write_channels(train_channels_path(c), h);
  log_info("wrote " + train_channels_path(c));
  if (c.training != "R") return;
  if (c.pilots != 1) throw std::invalid_argument("quantized training data uses a single pilot (frontend.pilots = 1)");
  const Rng noise(Rng(c.seed).substream(kTrainNoise));
  for (std::size_t bi = 0; bi < c.bits.size(); ++bi) {
    for (std::size_t si = 0; si < c.snr_db.size(); ++si) {
      const double sigma2 = sigma2_of(c.snr_db[si]);
      const QuantizedDataset r = observe_dataset(h, make_pilots(1), sigma2, quantizer_of(c.bits[bi], sigma2),
                                                 noise.substream(bi).substream(si));
      const std::string path = train_observations_path(c, c.bits[bi], c.snr_db[si]);
      write_observations(path, r);
      log_info("wrote " + path);
    }
  }
}

void cmd_train(const RunConfig& c) {
  ensure_dir(c);
  Rng rng(Rng(c.seed).substream(kTraining));
  const PilotConfig pilots = make_pilots(c.pilots);

  if (c.training == "R") {
    if (c.model_type != "gmm" && c.model_type != "vae") {
      throw std::invalid_argument("training from quantized data supports model.type gmm or vae");
    }
    for (int bits : c.bits) {
      for (double snr : c.snr_db) {
        const std::string in = train_observations_path(c, bits, snr);
        const QuantizedDataset r = read_observations(in);
        Rng cell_rng = rng.substream(static_cast<std::uint64_t>(bits) * 1000003u +
                                     static_cast<std::uint64_t>(std::llround((snr + 1000.0) * 1000.0)));
        const std::string out = default_model_path(c, c.model_type == "gmm" ? "bgmm" : "bvae", bits, snr);
        if (c.model_type == "gmm") {
          FitReport rep;
          const GmmModel m =
              fit_gmm_quantized(r.observations, c.components, r.sigma2, r.quantizer, c.em, cell_rng, &rep);
          write_gmm(out, m);
          log_info("fit_gmm_quantized: " + std::to_string(rep.iterations) + " iterations");
        } else {
          const VaeArchitecture arch = make_vae_architecture(r.antennas, 1, c.latent);
          const VaeModel m =
              train_vae_quantized(r.observations, r.sigma2, r.quantizer, arch, c.train, cell_rng, nullptr, print_progress);
          write_vae(out, m);
        }
        log_info("wrote " + out);
      }
    }
    return;
  }

  const std::string path = train_channels_path(c);
  if (!fs::exists(path)) throw IoError("training channels '" + path + "' not found; run 'generate' first");
  const ChannelDataset h = read_channels(path);
  if (c.model_type == "gmm") {
    FitReport rep;
    const GmmModel m = fit_gmm(h.samples, c.components, c.structure, c.em, rng, &rep);
    const std::string out = default_model_path(c, "bgmm", 0, 0.0);
    write_gmm(out, m);
    log_info("fit_gmm: " + std::to_string(rep.iterations) + " iterations; wrote " + out);
  } else if (c.model_type == "mfa") {
    FitReport rep;
    const MfaModel m = fit_mfa(h.samples, c.components, c.latent, c.em, rng, &rep);
    const std::string out = default_model_path(c, "bmfa", 0, 0.0);
    write_mfa(out, m);
    log_info("fit_mfa: " + std::to_string(rep.iterations) + " iterations; wrote " + out);
  } else {
    for (int bits : c.bits) {
      Rng cell_rng = rng.substream(static_cast<std::uint64_t>(bits));
      if (c.model_type == "vae") {
        const VaeArchitecture arch = make_vae_architecture(h.antennas(), c.pilots, c.latent);
        const VaeModel m = train_vae(h.samples, pilots, bits, arch, c.train, cell_rng, nullptr, print_progress);
        write_vae(default_model_path(c, "bvae", bits, 0.0), m);
      } else {
        const MlpParams m = train_dnn(h.samples, pilots, bits, c.train, cell_rng, nullptr, print_progress);
        write_dnn(default_model_path(c, "dnn", bits, 0.0), m);
      }
    }
  }
}

void cmd_recover(const RunConfig& c) {
  ensure_dir(c);
  RecoveryConfig rc;
  rc.scenario = c.scenario;
  rc.bits = c.recover_bits;
  rc.sizes = c.recover_sizes;
  rc.trials = c.recover_trials;
  rc.seed = Rng(c.seed).substream(kRecovery).seed();
  const std::vector<RecoveryRecord> records = run_recovery(rc);
  const std::string path = in_dir(c, "recovery.csv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_recovery_csv(out, records);
  if (!out) throw IoError("write failed for '" + path + "'");

  std::map<std::tuple<std::string, int, std::size_t>, std::vector<double>> groups;
  for (const RecoveryRecord& r : records) groups[{r.method, r.bits, r.samples}].push_back(r.nmse);
  for (auto& [key, v] : groups) {
    std::sort(v.begin(), v.end());
    const double median = v.size() % 2 == 1 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    log_info(std::get<0>(key) + " B=" + bits_tag(std::get<1>(key)) + " T=" + std::to_string(std::get<2>(key)) +
             " median nmse " + std::to_string(median));
  }
  log_info("wrote " + path);
}

void cmd_evaluate(const RunConfig& c) {
  ensure_dir(c);
  SweepConfig sc;
  sc.scenario = c.scenario;
  sc.pilots = c.pilots;
  sc.bits = c.bits;
  sc.snr_db = c.snr_db;
  sc.t_test = c.test_size;
  sc.seed = c.seed;
  sc.record_timing = c.record_timing;

  bool needs_cov = false;
  for (const EstimatorEntry& e : c.estimators) {
    const EstimatorKind kind = parse_estimator(e.kind);
    if (kind == EstimatorKind::BussScov || kind == EstimatorKind::Bls) needs_cov = true;

    auto make = [&](const std::string& path, int bits_only, double snr_only) {
      if (!fs::exists(path)) throw IoError("model file '" + path + "' not found");
      EstimatorSpec spec;
      spec.kind = kind;
      spec.label = e.label;
      spec.bits_only = bits_only;
      spec.snr_only = snr_only;
      switch (kind) {
        case EstimatorKind::Bgmm: spec.gmm = std::make_shared<GmmModel>(read_gmm(path)); break;
        case EstimatorKind::Bmfa: spec.mfa = std::make_shared<MfaModel>(read_mfa(path)); break;
        case EstimatorKind::Bvae: spec.vae = std::make_shared<VaeModel>(read_vae(path)); break;
        case EstimatorKind::Dnn: spec.dnn = std::make_shared<MlpParams>(read_dnn(path)); break;
        default: break;
      }
      sc.estimators.push_back(std::move(spec));
    };

    const double any_snr = std::numeric_limits<double>::quiet_NaN();
    if (kind == EstimatorKind::BussGenie || kind == EstimatorKind::BussScov || kind == EstimatorKind::Bls) {
      EstimatorSpec spec;
      spec.kind = kind;
      spec.label = e.label;
      sc.estimators.push_back(std::move(spec));
    } else if (!e.model.empty()) {
      make(e.model, -1, any_snr);
    } else if (kind == EstimatorKind::Bmfa || (kind == EstimatorKind::Bgmm && c.training == "H")) {
      make(default_model_path(c, e.kind, 0, 0.0), -1, any_snr);
    } else {
      const bool per_snr = c.training == "R";
      for (int bits : c.bits) {
        if (per_snr) {
          for (double snr : c.snr_db) make(default_model_path(c, e.kind, bits, snr), bits, snr);
        } else {
          make(default_model_path(c, e.kind, bits, 0.0), bits, any_snr);
        }
      }
    }
  }
  if (needs_cov) sc.train_covariance = sample_covariance(training_channels(c).samples);

  std::vector<EvalRecord> records = run_sweep(sc);
  // Per-cell models come out grouped by model; restore grid order.
  std::stable_sort(records.begin(), records.end(), [&](const EvalRecord& a, const EvalRecord& b) {
    auto pos = [&](const EvalRecord& r) {
      const auto bi = std::find(c.bits.begin(), c.bits.end(), r.bits) - c.bits.begin();
      const auto si = std::find(c.snr_db.begin(), c.snr_db.end(), r.snr_db) - c.snr_db.begin();
      return std::pair{bi, si};
    };
    return pos(a) < pos(b);
  });
  const std::string path = in_dir(c, "results.csv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_results_csv(out, records);
  if (!out) throw IoError("write failed for '" + path + "'");
  log_info("wrote " + std::to_string(records.size()) + " rows to " + path);
}

void cmd_inspect(const std::vector<std::string>& files, std::ostream& out) {
  for (const std::string& path : files) {
    std::array<char, 8> magic{};
    {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw IoError("cannot open '" + path + "'");
      in.read(magic.data(), 8);
      if (!in) throw IoError("'" + path + "' is too short");
    }
    const std::string m(magic.data(), 8);
    json j{{"file", path}};
    if (m == "QCEDATA1") {
      const DatasetHeader h = read_dataset_header(path);
      j["format"] = "QCE1";
      j["version"] = h.version;
      j["antennas"] = h.antennas;
      j["pilots"] = h.pilots;
      j["samples"] = h.count;
      j["quantized"] = h.quantized();
      if (h.quantized()) {
        j["bits"] = h.quantizer.is_infinite() ? json("inf") : json(h.quantizer.bits);
        j["step"] = h.quantizer.step;
        j["sigma2"] = h.sigma2;
      }
    } else if (m == "QCEMODL1") {
      const ModelHeader h = read_model_header(path);
      j["format"] = "QCM1";
      j["kind"] = h.kind == ModelKind::Gmm ? "gmm" : "mfa";
      j["structure"] = to_string(h.structure);
      j["K"] = h.components;
      j["antennas"] = h.antennas;
      j["L"] = h.latent;
    } else if (m == "QCENNET1") {
      const NetworkHeader h = read_network_header(path);
      j["format"] = "QCV1";
      j["kind"] = h.kind == NetworkKind::Vae ? "vae" : "dnn";
      j["antennas"] = h.antennas;
      j["pilots"] = h.pilots;
      j["L"] = h.latent;
      j["parameters"] = h.parameters;
    } else {
      throw IoError("'" + path + "' has an unknown file format");
    }
    out << j.dump() << '\n';
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Channel estimation with coarsely quantized observations"};
  app.require_subcommand(0, 1);
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string out_dir;
  bool print_config = false;
  auto* seed_opt = app.add_option("--seed", seed, "Root random seed (overrides the config)");
  auto* threads_opt = app.add_option("--threads", threads, "Worker thread cap (0 = all cores)");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_flag("--print-config", print_config, "Echo the resolved configuration to standard output");

  std::vector<std::string> inspect_files;
  app.add_subcommand("generate", "Write training datasets");
  app.add_subcommand("train", "Fit the configured model");
  app.add_subcommand("recover", "Run the covariance recovery experiment");
  app.add_subcommand("evaluate", "Run the estimator sweep and write results.csv");
  app.add_subcommand("inspect", "Print file headers")->add_option("files", inspect_files)->required();
  app.fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (app.get_subcommands().empty() && !print_config) {
    std::cerr << "a subcommand is required (or --print-config)\nRun with --help for more information.\n";
    return 2;
  }

  set_log_sink([](LogLevel level, const std::string& msg) {
    std::cerr << (level == LogLevel::Warning ? "warning: " : "") << msg << '\n';
  });

  try {
    RunConfig c;
    if (!config_path.empty()) c = load_config(config_path);
    if (*seed_opt) c.seed = seed;
    if (*threads_opt) c.threads = threads;
    if (*out_opt) c.out_dir = out_dir;
    set_num_threads(c.threads);
    if (print_config) std::cout << config_to_json(c).dump(2) << '\n';

    if (app.get_subcommands().empty()) return 0;
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "generate") {
      cmd_generate(c);
    } else if (cmd == "train") {
      cmd_train(c);
    } else if (cmd == "recover") {
      cmd_recover(c);
    } else if (cmd == "evaluate") {
      cmd_evaluate(c);
    } else {
      cmd_inspect(inspect_files, std::cout);
    }
    return 0;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace qce::cli
