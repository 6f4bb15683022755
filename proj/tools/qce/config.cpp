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

#include "qce/config.hpp"

#include <fstream>
#include <set>

namespace qce::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw IoError("config: " + where + ": " + what);
}

// Object view that rejects keys outside `allowed`.
class Section {
 public:
  Section(const json& j, std::string where, std::set<std::string> allowed)
      : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail(where_, "expected an object");
    for (const auto& item : j_.items()) {
      if (allowed.count(item.key()) == 0) fail(where_, "unknown key '" + item.key() + "'");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& at(const std::string& key) const { return j_.at(key); }
  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  template <typename T>
  void read(const std::string& key, T& out) const {
    if (!has(key)) return;
    out = convert<T>(j_.at(key), path(key));
  }

  template <typename T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(where, "expected a boolean");
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) fail(where, "expected a nonnegative integer");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(where, "expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(where, "expected a number");
    } else {
      if (!v.is_string()) fail(where, "expected a string");
    }
    return v.get<T>();
  }

 private:
  const json& j_;
  std::string where_;
};

int parse_bits(const json& v, const std::string& where) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return 0;
    fail(where, "bit width must be an integer in 1.." + std::to_string(kMaxBits) + " or \"inf\"");
  }
  const int b = Section::convert<int>(v, where);
  if (b < 1 || b > kMaxBits) fail(where, "bit width must be in 1.." + std::to_string(kMaxBits));
  return b;
}

json bits_to_json(const std::vector<int>& bits) {
  json a = json::array();
  for (int b : bits) {
    if (b == 0) {
      a.push_back("inf");
    } else {
      a.push_back(b);
    }
  }
  return a;
}

template <typename T>
std::vector<T> read_list(const Section& s, const std::string& key, std::vector<T> fallback) {
  if (!s.has(key)) return fallback;
  const json& v = s.at(key);
  if (!v.is_array() || v.empty()) fail(s.path(key), "expected a nonempty array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(Section::convert<T>(v[i], s.path(key)));
  return out;
}

void check(bool ok, const std::string& where, const std::string& what) {
  if (!ok) fail(where, what);
}

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig c;
  const Section root(j, "", {"version", "seed", "threads", "out_dir", "scenario", "frontend", "data", "model", "eval",
                             "recover"});
  if (!root.has("version")) fail("version", "missing");
  int version = 0;
  root.read("version", version);
  check(version == kConfigVersion, "version", "unsupported version " + std::to_string(version));
  root.read("seed", c.seed);
  root.read("threads", c.threads);
  root.read("out_dir", c.out_dir);

  if (root.has("scenario")) {
    const Section s(root.at("scenario"), "scenario", {"name", "antennas", "clusters", "angle_spread_deg"});
    s.read("name", c.scenario.name);
    s.read("antennas", c.scenario.antennas);
    s.read("clusters", c.scenario.clusters);
    s.read("angle_spread_deg", c.scenario.angle_spread_deg);
  }
  check(c.scenario.antennas >= 1, "scenario.antennas", "must be >= 1");
  check(c.scenario.clusters >= 1, "scenario.clusters", "must be >= 1");
  check(c.scenario.angle_spread_deg > 0.0, "scenario.angle_spread_deg", "must be positive");

  if (root.has("frontend")) {
    const Section s(root.at("frontend"), "frontend", {"pilots", "bits", "snr_db"});
    s.read("pilots", c.pilots);
    if (s.has("bits")) {
      const json& b = s.at("bits");
      if (!b.is_array() || b.empty()) fail("frontend.bits", "expected a nonempty array");
      c.bits.clear();
      for (const json& v : b) c.bits.push_back(parse_bits(v, "frontend.bits"));
    }
    c.snr_db = read_list<double>(s, "snr_db", c.snr_db);
  }
  check(c.pilots >= 1, "frontend.pilots", "must be >= 1");

  if (root.has("data")) {
    const Section s(root.at("data"), "data", {"train", "test"});
    s.read("train", c.train_size);
    s.read("test", c.test_size);
  }
  check(c.train_size >= 1 && c.test_size >= 1, "data", "train and test sizes must be positive");

  if (root.has("model")) {
    const Section s(root.at("model"), "model", {"type", "training", "K", "L", "structure", "em", "train"});
    s.read("type", c.model_type);
    s.read("training", c.training);
    s.read("K", c.components);
    s.read("L", c.latent);
    if (s.has("structure")) {
      try {
        c.structure = parse_structure(Section::convert<std::string>(s.at("structure"), "model.structure"));
      } catch (const std::invalid_argument& e) {
        fail("model.structure", e.what());
      }
    }
    if (s.has("em")) {
      const Section e(s.at("em"), "model.em", {"max_iter", "tol", "regularization", "kmeans_iter"});
      e.read("max_iter", c.em.max_iter);
      e.read("tol", c.em.tol);
      e.read("regularization", c.em.regularization);
      e.read("kmeans_iter", c.em.kmeans_iter);
    }
    if (s.has("train")) {
      const Section t(s.at("train"), "model.train",
                      {"learning_rate", "beta1", "beta2", "epsilon", "batch_size", "epochs", "validation_fraction",
                       "snr_min_db", "snr_max_db"});
      t.read("learning_rate", c.train.learning_rate);
      t.read("beta1", c.train.beta1);
      t.read("beta2", c.train.beta2);
      t.read("epsilon", c.train.epsilon);
      t.read("batch_size", c.train.batch_size);
      t.read("epochs", c.train.epochs);
      t.read("validation_fraction", c.train.validation_fraction);
      t.read("snr_min_db", c.train.snr_min_db);
      t.read("snr_max_db", c.train.snr_max_db);
    }
  }
  const std::set<std::string> types{"gmm", "mfa", "vae", "dnn"};
  check(types.count(c.model_type) == 1, "model.type", "must be one of gmm, mfa, vae, dnn");
  check(c.training == "H" || c.training == "R", "model.training", "must be \"H\" or \"R\"");
  check(c.components >= 1, "model.K", "must be >= 1");
  check(c.train.batch_size >= 1, "model.train.batch_size", "must be >= 1");
  check(c.train.validation_fraction > 0.0 && c.train.validation_fraction < 1.0, "model.train.validation_fraction",
        "must lie in (0, 1)");

  if (root.has("eval")) {
    const Section s(root.at("eval"), "eval", {"estimators", "record_timing"});
    s.read("record_timing", c.record_timing);
    if (s.has("estimators")) {
      const json& list = s.at("estimators");
      if (!list.is_array() || list.empty()) fail("eval.estimators", "expected a nonempty array");
      c.estimators.clear();
      for (const json& v : list) {
        EstimatorEntry e;
        if (v.is_string()) {
          e.kind = v.get<std::string>();
        } else {
          const Section es(v, "eval.estimators[]", {"kind", "label", "model"});
          if (!es.has("kind")) fail("eval.estimators[]", "missing 'kind'");
          es.read("kind", e.kind);
          es.read("label", e.label);
          es.read("model", e.model);
        }
        const std::set<std::string> kinds{"buss_genie", "buss_scov", "bls", "bgmm", "bmfa", "bvae", "dnn"};
        check(kinds.count(e.kind) == 1, "eval.estimators", "unknown estimator '" + e.kind + "'");
        c.estimators.push_back(std::move(e));
      }
    }
  }

  if (root.has("recover")) {
    const Section s(root.at("recover"), "recover", {"bits", "sizes", "trials"});
    c.recover_bits = read_list<int>(s, "bits", c.recover_bits);
    c.recover_sizes = read_list<std::size_t>(s, "sizes", c.recover_sizes);
    s.read("trials", c.recover_trials);
  }
  for (int b : c.recover_bits) check(b >= 2 && b <= kMaxBits, "recover.bits", "recovery needs 2..8 bits");
  check(c.recover_trials >= 1, "recover.trials", "must be >= 1");
  return c;
}

json config_to_json(const RunConfig& c) {
  json est = json::array();
  for (const EstimatorEntry& e : c.estimators) {
    json o{{"kind", e.kind}};
    if (!e.label.empty()) o["label"] = e.label;
    if (!e.model.empty()) o["model"] = e.model;
    est.push_back(o);
  }
  return json{
      {"version", kConfigVersion},
      {"seed", c.seed},
      {"threads", c.threads},
      {"out_dir", c.out_dir},
      {"scenario",
       {{"name", c.scenario.name},
        {"antennas", c.scenario.antennas},
        {"clusters", c.scenario.clusters},
        {"angle_spread_deg", c.scenario.angle_spread_deg}}},
      {"frontend", {{"pilots", c.pilots}, {"bits", bits_to_json(c.bits)}, {"snr_db", c.snr_db}}},
      {"data", {{"train", c.train_size}, {"test", c.test_size}}},
      {"model",
       {{"type", c.model_type},
        {"training", c.training},
        {"K", c.components},
        {"L", c.latent},
        {"structure", to_string(c.structure)},
        {"em",
         {{"max_iter", c.em.max_iter},
          {"tol", c.em.tol},
          {"regularization", c.em.regularization},
          {"kmeans_iter", c.em.kmeans_iter}}},
        {"train",
         {{"learning_rate", c.train.learning_rate},
          {"beta1", c.train.beta1},
          {"beta2", c.train.beta2},
          {"epsilon", c.train.epsilon},
          {"batch_size", c.train.batch_size},
          {"epochs", c.train.epochs},
          {"validation_fraction", c.train.validation_fraction},
          {"snr_min_db", c.train.snr_min_db},
          {"snr_max_db", c.train.snr_max_db}}}}},
      {"eval", {{"estimators", est}, {"record_timing", c.record_timing}}},
      {"recover", {{"bits", c.recover_bits}, {"sizes", c.recover_sizes}, {"trials", c.recover_trials}}},
  };
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

}  // namespace qce::cli
