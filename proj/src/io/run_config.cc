/*
 * Copyright 2026 The deepfdaf Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "deepfdaf/run_config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <limits>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "deepfdaf/error.h"

namespace deepfdaf::io {
namespace {

namespace pt = boost::property_tree;

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorKind::kInvalidConfig, msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    config_error(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    config_error(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  config_error(key + ": expected true or false, got '" + v + "'");
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

struct Field {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  // Empty optional: omit from the canonical text.
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

template <typename T>
Field number(std::string section, std::string key, T RunConfig::*member) {
  Field f{std::move(section), std::move(key), nullptr, nullptr};
  f.set = [member](RunConfig& c, const std::string& k, const std::string& v) {
    if constexpr (std::is_same_v<T, double>) {
      c.*member = to_double(k, v);
    } else {
      c.*member = static_cast<T>(to_u64(k, v));
    }
  };
  f.get = [member](const RunConfig& c) -> std::optional<std::string> {
    if constexpr (std::is_same_v<T, double>) {
      return fmt(c.*member);
    } else {
      return fmt(static_cast<std::uint64_t>(c.*member));
    }
  };
  return f;
}

Field optional_number(std::string section, std::string key,
                      std::optional<double> RunConfig::*member) {
  Field f{std::move(section), std::move(key), nullptr, nullptr};
  f.set = [member](RunConfig& c, const std::string& k, const std::string& v) {
    c.*member = to_double(k, v);
  };
  f.get = [member](const RunConfig& c) -> std::optional<std::string> {
    if (!(c.*member)) return std::nullopt;
    return fmt(*(c.*member));
  };
  return f;
}

template <typename T>
Field scenario_number(std::string key, T scenario::ScenarioConfig::*member) {
  Field f{"scenario", std::move(key), nullptr, nullptr};
  f.set = [member](RunConfig& c, const std::string& k, const std::string& v) {
    if constexpr (std::is_same_v<T, double>) {
      c.scenario.*member = to_double(k, v);
    } else if constexpr (std::is_same_v<T, bool>) {
      c.scenario.*member = to_bool(k, v);
    } else {
      c.scenario.*member = static_cast<T>(to_u64(k, v));
    }
  };
  f.get = [member](const RunConfig& c) -> std::optional<std::string> {
    if constexpr (std::is_same_v<T, double> || std::is_same_v<T, bool>) {
      return fmt(c.scenario.*member);
    } else {
      return fmt(static_cast<std::uint64_t>(c.scenario.*member));
    }
  };
  return f;
}

Field source_kind(std::string key,
                  scenario::SourceKind scenario::ScenarioConfig::*member) {
  Field f{"scenario", std::move(key), nullptr, nullptr};
  f.set = [member](RunConfig& c, const std::string&, const std::string& v) {
    c.scenario.*member = scenario::parse_source_kind(v);
  };
  f.get = [member](const RunConfig& c) -> std::optional<std::string> {
    return std::string(scenario::source_kind_name(c.scenario.*member));
  };
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = [] {
    using SC = scenario::ScenarioConfig;
    std::vector<Field> v;
    Field fft{"frame", "fft_size", nullptr, nullptr};
    fft.set = [](RunConfig& c, const std::string& k, const std::string& s) {
      c.frame.fft_size = to_u64(k, s);
    };
    fft.get = [](const RunConfig& c) -> std::optional<std::string> {
      return fmt(static_cast<std::uint64_t>(c.frame.fft_size));
    };
    v.push_back(fft);
    Field hop{"frame", "hop", nullptr, nullptr};
    hop.set = [](RunConfig& c, const std::string& k, const std::string& s) {
      c.frame.hop = to_u64(k, s);
    };
    hop.get = [](const RunConfig& c) -> std::optional<std::string> {
      return fmt(static_cast<std::uint64_t>(c.frame.hop));
    };
    v.push_back(hop);

    Field ctrl{"control", "controller", nullptr, nullptr};
    ctrl.set = [](RunConfig& c, const std::string&, const std::string& s) {
      c.controller = s;
    };
    ctrl.get = [](const RunConfig& c) -> std::optional<std::string> {
      return c.controller;
    };
    v.push_back(ctrl);
    v.push_back(number("control", "mu_fdaf", &RunConfig::mu_fdaf));
    v.push_back(number("control", "lambda_x", &RunConfig::lambda_x));
    v.push_back(optional_number("control", "lambda_p", &RunConfig::lambda_p));
    v.push_back(optional_number("control", "mu_max", &RunConfig::mu_max));
    v.push_back(number("control", "reg", &RunConfig::reg));

    v.push_back(number("kalman", "a", &RunConfig::kalman_a));
    v.push_back(number("kalman", "psi_dw_init", &RunConfig::psi_dw_init));
    v.push_back(number("kalman", "noise_smoothing", &RunConfig::noise_smoothing));

    v.push_back(number("network", "hidden", &RunConfig::hidden));
    v.push_back(number("network", "log_floor", &RunConfig::log_floor));
    v.push_back(number("network", "sigma_floor", &RunConfig::sigma_floor));
    v.push_back(number("network", "init_seed", &RunConfig::init_seed));

    v.push_back(number("training", "epochs", &RunConfig::epochs));
    v.push_back(number("training", "batch_size", &RunConfig::batch_size));
    v.push_back(number("training", "learning_rate", &RunConfig::learning_rate));
    v.push_back(number("training", "beta1", &RunConfig::beta1));
    v.push_back(number("training", "beta2", &RunConfig::beta2));
    v.push_back(number("training", "adam_epsilon", &RunConfig::adam_epsilon));
    v.push_back(number("training", "clip_norm", &RunConfig::clip_norm));
    v.push_back(number("training", "truncation", &RunConfig::truncation));
    v.push_back(number("training", "frozen_prefix", &RunConfig::frozen_prefix));
    v.push_back(number("training", "loss_floor", &RunConfig::loss_floor));
    v.push_back(number("training", "seed", &RunConfig::train_seed));
    v.push_back(number("training", "threads", &RunConfig::threads));
    v.push_back(number("training", "corpus_size", &RunConfig::corpus_size));

    v.push_back(scenario_number("sample_rate", &SC::sample_rate));
    v.push_back(scenario_number("air_length", &SC::air_length));
    v.push_back(scenario_number("duration_s", &SC::duration_s));
    v.push_back(scenario_number("with_switch", &SC::with_switch));
    v.push_back(scenario_number("switch_lo_s", &SC::switch_lo_s));
    v.push_back(scenario_number("switch_hi_s", &SC::switch_hi_s));
    v.push_back(scenario_number("with_speech_noise", &SC::with_speech_noise));
    v.push_back(scenario_number("speech_snr_lo_db", &SC::speech_snr_lo_db));
    v.push_back(scenario_number("speech_snr_hi_db", &SC::speech_snr_hi_db));
    v.push_back(scenario_number("with_white_noise", &SC::with_white_noise));
    v.push_back(scenario_number("white_snr_lo_db", &SC::white_snr_lo_db));
    v.push_back(scenario_number("white_snr_hi_db", &SC::white_snr_hi_db));
    v.push_back(scenario_number("t60_lo_s", &SC::t60_lo_s));
    v.push_back(scenario_number("t60_hi_s", &SC::t60_hi_s));
    v.push_back(source_kind("input_kind", &SC::input_kind));
    v.push_back(source_kind("noise_kind", &SC::noise_kind));
    v.push_back(scenario_number("input_rms", &SC::input_rms));
    v.push_back(number("scenario", "seed", &RunConfig::scenario_seed));

    v.push_back(number("metrics", "erle_smoothing", &RunConfig::erle_smoothing));

    Field ctrls{"eval", "controllers", nullptr, nullptr};
    ctrls.set = [](RunConfig& c, const std::string&, const std::string& s) {
      c.eval_controllers.clear();
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) c.eval_controllers.push_back(item);
      }
    };
    ctrls.get = [](const RunConfig& c) -> std::optional<std::string> {
      std::string out;
      for (const auto& name : c.eval_controllers) {
        if (!out.empty()) out += ",";
        out += name;
      }
      return out;
    };
    v.push_back(ctrls);
    return v;
  }();
  return kFields;
}

}  // namespace

ControllerSpec parse_controller(const std::string& name, double default_a) {
  ControllerSpec spec;
  if (name == "fdaf") return spec;
  if (name == "kf" || name.rfind("kf_", 0) == 0) {
    spec.kind = ControllerSpec::Kind::kKalman;
    spec.kalman_a =
        name == "kf" ? default_a : to_double("controller " + name, name.substr(3));
    if (!(spec.kalman_a >= 0.0 && spec.kalman_a <= 1.0)) {
      config_error("Kalman transition factor must be in [0, 1]: " + name);
    }
    return spec;
  }
  spec.kind = ControllerSpec::Kind::kMasked;
  try {
    spec.variant = control::parse_variant(name);
  } catch (const Error&) {
    config_error("unknown controller '" + name + "'");
  }
  return spec;
}

void RunConfig::validate() const {
  try {
    frame.validate();
    scenario.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (!(scenario.dims == frame)) config_error("scenario dims differ from [frame]");
  parse_controller(controller, kalman_a);
  for (const auto& name : eval_controllers) parse_controller(name, kalman_a);
  auto in_unit = [](double v) { return v >= 0.0 && v < 1.0; };
  if (!(mu_fdaf > 0.0)) config_error("mu_fdaf must be positive");
  if (!in_unit(lambda_x)) config_error("lambda_x must be in [0, 1)");
  if (lambda_p && !in_unit(*lambda_p)) config_error("lambda_p must be in [0, 1)");
  if (mu_max && !(*mu_max >= 0.0)) config_error("mu_max must be non-negative");
  if (!(reg > 0.0)) config_error("reg must be positive");
  if (!(kalman_a >= 0.0 && kalman_a <= 1.0)) config_error("kalman a must be in [0, 1]");
  if (!(psi_dw_init >= 0.0)) config_error("psi_dw_init must be non-negative");
  if (!in_unit(noise_smoothing)) config_error("noise_smoothing must be in [0, 1)");
  if (hidden == 0) config_error("hidden must be positive");
  if (!(log_floor > 0.0) || !(sigma_floor > 0.0)) config_error("floors must be positive");
  if (batch_size == 0) config_error("batch_size must be positive");
  if (!(learning_rate > 0.0)) config_error("learning_rate must be positive");
  if (!in_unit(beta1) || !in_unit(beta2)) config_error("beta1/beta2 must be in [0, 1)");
  if (!(adam_epsilon > 0.0)) config_error("adam_epsilon must be positive");
  if (!(clip_norm >= 0.0)) config_error("clip_norm must be non-negative");
  if (!(loss_floor > 0.0)) config_error("loss_floor must be positive");
  if (corpus_size == 0) config_error("corpus_size must be positive");
  if (!in_unit(erle_smoothing)) config_error("erle_smoothing must be in [0, 1)");
}

control::MaskedFdafParams RunConfig::masked_params(control::Variant v) const {
  control::MaskedFdafParams p = control::variant_params(v);
  p.lambda_x = lambda_x;
  if (lambda_p) p.lambda_p = *lambda_p;
  if (mu_max) p.mu_max = *mu_max;
  p.reg = reg;
  return p;
}

training::LossConfig RunConfig::loss_config() const {
  training::LossConfig lc;
  lc.dims = frame;
  const ControllerSpec spec = parse_controller(controller, kalman_a);
  lc.variant = spec.kind == ControllerSpec::Kind::kMasked
                   ? spec.variant
                   : control::Variant::kDnnFdaf;
  lc.params = masked_params(lc.variant);
  lc.eps = log_floor;
  lc.loss_floor = loss_floor;
  lc.truncation = truncation;
  lc.frozen_prefix = frozen_prefix;
  return lc;
}

training::TrainConfig RunConfig::train_config() const {
  training::TrainConfig tc;
  tc.loss = loss_config();
  tc.adam.learning_rate = learning_rate;
  tc.adam.beta1 = beta1;
  tc.adam.beta2 = beta2;
  tc.adam.epsilon = adam_epsilon;
  tc.adam.clip_norm = clip_norm;
  tc.epochs = epochs;
  tc.batch_size = batch_size;
  tc.seed = train_seed;
  tc.threads = threads;
  return tc;
}

RunConfig parse_run_config(const std::string& text) {
  // '#' comments are not understood by the INI reader.
  std::stringstream cleaned;
  {
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const std::string t = trim(line);
      if (!t.empty() && t[0] == '#') continue;
      cleaned << line << '\n';
    }
  }
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(cleaned, tree);
  } catch (const pt::ini_parser_error& e) {
    config_error(std::string("malformed config: ") + e.what());
  }
  RunConfig c;
  const auto& all = fields();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      config_error("key '" + section + "' outside of a section");
    }
    if (std::none_of(all.begin(), all.end(),
                     [&](const Field& f) { return f.section == section; })) {
      config_error("unknown config section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      const std::string name = section + "." + key;
      auto it = std::find_if(all.begin(), all.end(), [&](const Field& f) {
        return f.section == section && f.key == key;
      });
      if (it == all.end()) config_error("unknown config key '" + name + "'");
      it->set(c, name, trim(value.data()));
    }
  }
  c.scenario.dims = c.frame;
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

void apply_override(RunConfig& c, const std::string& dotted_key,
                    const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos) {
    config_error("override '" + dotted_key + "' must be section.key");
  }
  const std::string section = dotted_key.substr(0, dot);
  const std::string key = dotted_key.substr(dot + 1);
  const auto& all = fields();
  auto it = std::find_if(all.begin(), all.end(), [&](const Field& f) {
    return f.section == section && f.key == key;
  });
  if (it == all.end()) config_error("unknown config key '" + dotted_key + "'");
  it->set(c, dotted_key, trim(value));
  c.scenario.dims = c.frame;
}

std::string serialize_run_config(const RunConfig& c) {
  std::string out;
  std::string current;
  for (const Field& f : fields()) {
    const std::optional<std::string> value = f.get(c);
    if (!value) continue;
    if (f.section != current) {
      if (!current.empty()) out += "\n";
      out += "[" + f.section + "]\n";
      current = f.section;
    }
    out += f.key + " = " + *value + "\n";
  }
  return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return serialize_run_config(a) == serialize_run_config(b);
}

std::uint64_t config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_run_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace deepfdaf::io
