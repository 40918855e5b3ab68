// Copyright 2026 The gpmmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gpmmm/io/json.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gpmmm/error.hpp"

namespace gpmmm::io {
namespace {

std::string Describe(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return "null";
    case Json::value_t::object: return "an object";
    case Json::value_t::array: return "an array";
    case Json::value_t::string: return "a string";
    case Json::value_t::boolean: return "a boolean";
    default: return "a number";
  }
}

template <typename F>
auto Enum(ObjectReader& r, const std::string& key, const std::string& fallback, F parse) {
  const std::string s = r.String(key, fallback);
  try {
    return parse(s);
  } catch (const Error& e) {
    throw SchemaError(r.PathOf(key) + ": " + e.what());
  }
}

const char* FamilyName(transforms::StockFamily f) {
  return f == transforms::StockFamily::kGeometric ? "geometric" : "pascal";
}

}  // namespace

Json ParseJson(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    if (pos != std::string::npos) what = what.substr(pos);
    throw SchemaError(source + ": line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
  }
}

Json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseJson(ss.str(), path);
}

std::string DumpJson(const Json& j) { return j.dump(2) + "\n"; }

void WriteJson(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write " + path);
  out << DumpJson(j);
  if (!out) throw Error("write failed: " + path);
}

ObjectReader::ObjectReader(const Json& j, std::string path) : json_(j), path_(std::move(path)) {
  if (!json_.is_object()) throw SchemaError(path_ + ": expected an object, found " + Describe(json_));
}

std::string ObjectReader::PathOf(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

bool ObjectReader::Has(const std::string& key) const { return json_.contains(key); }

const Json* ObjectReader::Find(const std::string& key) {
  const auto it = json_.find(key);
  if (it == json_.end()) return nullptr;
  read_.insert(key);
  return &*it;
}

const Json& ObjectReader::Raw(const std::string& key) {
  const Json* v = Find(key);
  if (!v) throw SchemaError(PathOf(key) + ": required key is missing");
  return *v;
}

double ObjectReader::Number(const std::string& key, double fallback) {
  const Json* v = Find(key);
  if (!v) return fallback;
  if (!v->is_number()) throw SchemaError(PathOf(key) + ": expected a number, found " + Describe(*v));
  return v->get<double>();
}

int ObjectReader::Int(const std::string& key, int fallback) {
  const Json* v = Find(key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw SchemaError(PathOf(key) + ": expected an integer, found " + Describe(*v));
  const auto x = v->get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw SchemaError(PathOf(key) + ": integer out of range");
  return static_cast<int>(x);
}

std::uint64_t ObjectReader::Seed(const std::string& key, std::uint64_t fallback) {
  const Json* v = Find(key);
  if (!v) return fallback;
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_number_integer() && v->get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v->get<std::int64_t>());
  throw SchemaError(PathOf(key) + ": expected a nonnegative integer seed");
}

bool ObjectReader::Bool(const std::string& key, bool fallback) {
  const Json* v = Find(key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw SchemaError(PathOf(key) + ": expected a boolean, found " + Describe(*v));
  return v->get<bool>();
}

std::string ObjectReader::String(const std::string& key, const std::string& fallback) {
  const Json* v = Find(key);
  if (!v) return fallback;
  if (!v->is_string()) throw SchemaError(PathOf(key) + ": expected a string, found " + Describe(*v));
  return v->get<std::string>();
}

std::vector<double> ObjectReader::Numbers(const std::string& key, const std::vector<double>& fallback) {
  const Json* v = Find(key);
  if (!v) return fallback;
  if (!v->is_array()) throw SchemaError(PathOf(key) + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number())
      throw SchemaError(PathOf(key) + "[" + std::to_string(i) + "]: expected a number, found " + Describe((*v)[i]));
    out.push_back((*v)[i].get<double>());
  }
  return out;
}

std::vector<std::string> ObjectReader::Strings(const std::string& key, const std::vector<std::string>& fallback) {
  const Json* v = Find(key);
  if (!v) return fallback;
  if (!v->is_array()) throw SchemaError(PathOf(key) + ": expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_string())
      throw SchemaError(PathOf(key) + "[" + std::to_string(i) + "]: expected a string, found " + Describe((*v)[i]));
    out.push_back((*v)[i].get<std::string>());
  }
  return out;
}

ObjectReader ObjectReader::Child(const std::string& key) {
  static const Json kEmpty = Json::object();
  const Json* v = Find(key);
  return ObjectReader(v ? *v : kEmpty, PathOf(key));
}

void ObjectReader::Finish() const {
  for (auto it = json_.begin(); it != json_.end(); ++it)
    if (!read_.count(it.key())) throw SchemaError(PathOf(it.key()) + ": unknown key");
}

void CheckSchemaVersion(ObjectReader& r) {
  const int v = r.Int("schema_version", kSchemaVersion);
  if (v != kSchemaVersion)
    throw SchemaError(r.PathOf("schema_version") + ": unsupported version " + std::to_string(v) + " (expected " +
                      std::to_string(kSchemaVersion) + ")");
}

transforms::StockSpec StockFromJson(ObjectReader r) {
  transforms::StockSpec s;
  s.decay = r.Number("decay", s.decay);
  s.lags = r.Int("lags", s.lags);
  s.family = Enum(r, "family", FamilyName(s.family), [](const std::string& v) {
    if (v == "geometric") return transforms::StockFamily::kGeometric;
    if (v == "pascal") return transforms::StockFamily::kPascal;
    throw SchemaError("expected geometric or pascal, found '" + v + "'");
  });
  s.pascal_shape = r.Int("pascal_shape", s.pascal_shape);
  s.convention = Enum(r, "convention", "printed", [](const std::string& v) {
    if (v == "printed") return transforms::BinomialConvention::kPrinted;
    if (v == "standard") return transforms::BinomialConvention::kStandard;
    throw SchemaError("expected printed or standard, found '" + v + "'");
  });
  r.Finish();
  try {
    transforms::Validate(s);
  } catch (const DomainError& e) {
    throw SchemaError(r.path() + ": " + e.what());
  }
  return s;
}

Json ToJson(const transforms::StockSpec& s) {
  return Json{{"decay", s.decay},
              {"lags", s.lags},
              {"family", FamilyName(s.family)},
              {"pascal_shape", s.pascal_shape},
              {"convention", s.convention == transforms::BinomialConvention::kPrinted ? "printed" : "standard"}};
}

mmm::InferenceSpec InferenceFromJson(ObjectReader r) {
  mmm::InferenceSpec s;
  s.mode = Enum(r, "mode", "point", [](const std::string& v) {
    if (v == "point") return mmm::InferenceMode::kPoint;
    if (v == "metropolis") return mmm::InferenceMode::kMetropolis;
    throw SchemaError("expected point or metropolis, found '" + v + "'");
  });
  s.restarts = r.Int("restarts", s.restarts);
  ObjectReader c = r.Child("chain");
  s.chain.chain_length = c.Int("chain_length", s.chain.chain_length);
  s.chain.burn_in = c.Int("burn_in", s.chain.burn_in);
  s.chain.thin = c.Int("thin", s.chain.thin);
  s.chain.target_acceptance = c.Number("target_acceptance", s.chain.target_acceptance);
  s.chain.initial_scale = c.Number("initial_scale", s.chain.initial_scale);
  c.Finish();
  r.Finish();
  if (s.restarts < 1) throw SchemaError(r.PathOf("restarts") + ": must be at least 1");
  return s;
}

Json ToJson(const mmm::InferenceSpec& s) {
  return Json{{"mode", s.mode == mmm::InferenceMode::kPoint ? "point" : "metropolis"},
              {"restarts", s.restarts},
              {"chain",
               {{"chain_length", s.chain.chain_length},
                {"burn_in", s.chain.burn_in},
                {"thin", s.chain.thin},
                {"target_acceptance", s.chain.target_acceptance},
                {"initial_scale", s.chain.initial_scale}}}};
}

mmm::ModelSpec ModelSpecFromJson(ObjectReader r) {
  const mmm::ModelKind kind = Enum(r, "kind", "nonlinear_gp", mmm::ModelKindFromString);
  mmm::ModelSpec s;
  switch (kind) {
    case mmm::ModelKind::kNonlinearGP: s = mmm::NonlinearSpec(); break;
    case mmm::ModelKind::kTimeVaryingGP: s = mmm::TimeVaryingSpec(); break;
    case mmm::ModelKind::kLogTimeVarying: s = mmm::LogTimeVaryingSpec(); break;
    case mmm::ModelKind::kHillParametric: s = mmm::HillSpec(); break;
  }
  s.intercept = Enum(r, "intercept", mmm::ToString(s.intercept), mmm::InterceptKindFromString);
  s.season_cycle = r.Number("season_cycle", s.season_cycle);
  s.log_inputs = r.Bool("log_inputs", s.log_inputs);
  s.log_outcome = r.Bool("log_outcome", s.log_outcome);
  s.log_floor = r.Number("log_floor", s.log_floor);
  if (r.Has("carryover") && !r.Raw("carryover").is_null()) s.carryover = StockFromJson(r.Child("carryover"));
  s.dummies = r.Strings("dummies", s.dummies);
  s.inference = InferenceFromJson(r.Child("inference"));
  r.Finish();
  try {
    s.Validate();
  } catch (const DomainError& e) {
    throw SchemaError(r.PathOf("kind") + ": " + e.what());
  }
  return s;
}

Json ToJson(const mmm::ModelSpec& s) {
  Json j{{"kind", mmm::ToString(s.kind)},
         {"intercept", mmm::ToString(s.intercept)},
         {"season_cycle", s.season_cycle},
         {"log_inputs", s.log_inputs},
         {"log_outcome", s.log_outcome},
         {"log_floor", s.log_floor}};
  j["carryover"] = s.carryover ? ToJson(*s.carryover) : Json(nullptr);
  j["dummies"] = s.dummies;
  j["inference"] = ToJson(s.inference);
  return j;
}

sim::SpendingSpec SpendingFromJson(ObjectReader r, const sim::SpendingSpec& base) {
  sim::SpendingSpec s = base;
  s.drift = r.Number("drift", s.drift);
  s.ar_coef = r.Number("ar_coef", s.ar_coef);
  s.sd = r.Number("sd", s.sd);
  s.initial = r.Number("initial", s.initial);
  s.periods = r.Int("periods", s.periods);
  if (r.Has("clamp_floor")) {
    const Json& v = r.Raw("clamp_floor");
    if (v.is_null()) {
      s.clamp_floor = sim::SpendingSpec::kNoClamp;
    } else if (v.is_number()) {
      s.clamp_floor = v.get<double>();
    } else {
      throw SchemaError(r.PathOf("clamp_floor") + ": expected a number or null");
    }
  }
  r.Finish();
  return s;
}

Json ToJson(const sim::SpendingSpec& s) {
  Json j{{"drift", s.drift}, {"ar_coef", s.ar_coef}, {"sd", s.sd}, {"initial", s.initial}, {"periods", s.periods}};
  j["clamp_floor"] = std::isinf(s.clamp_floor) ? Json(nullptr) : Json(s.clamp_floor);
  return j;
}

sim::DgpSpec DgpFromJson(ObjectReader r) {
  sim::DgpSpec s;
  s.kind = Enum(r, "kind", sim::ToString(s.kind), sim::DgpKindFromString);
  s.amplitude = r.Number("amplitude", s.amplitude);
  s.smoothness = r.Number("smoothness", s.smoothness);
  s.hill_shape = r.Number("hill_shape", s.hill_shape);
  s.hill_k_ratio = r.Number("hill_k_ratio", s.hill_k_ratio);
  s.hill_amplitude = r.Number("hill_amplitude", s.hill_amplitude);
  s.noise_ratio = r.Number("noise_ratio", s.noise_ratio);
  if (r.Has("carryover") && !r.Raw("carryover").is_null()) s.carryover = StockFromJson(r.Child("carryover"));
  s.intercept = r.Number("intercept", s.intercept);
  r.Finish();
  return s;
}

Json ToJson(const sim::DgpSpec& s) {
  Json j{{"kind", sim::ToString(s.kind)},         {"amplitude", s.amplitude},
         {"smoothness", s.smoothness},            {"hill_shape", s.hill_shape},
         {"hill_k_ratio", s.hill_k_ratio},        {"hill_amplitude", s.hill_amplitude},
         {"noise_ratio", s.noise_ratio}};
  j["carryover"] = s.carryover ? ToJson(*s.carryover) : Json(nullptr);
  j["intercept"] = s.intercept;
  return j;
}

sim::IntroConfig IntroFromJson(ObjectReader r, const sim::IntroConfig& base) {
  sim::IntroConfig c = base;
  c.periods = r.Int("periods", c.periods);
  c.cycle = r.Int("cycle", c.cycle);
  c.lag = r.Int("lag", c.lag);
  c.b0 = r.Number("b0", c.b0);
  c.b1 = r.Number("b1", c.b1);
  c.c0 = r.Number("c0", c.c0);
  c.c1 = r.Number("c1", c.c1);
  c.spend_noise_sd = r.Number("spend_noise_sd", c.spend_noise_sd);
  c.outcome_noise_sd = r.Number("outcome_noise_sd", c.outcome_noise_sd);
  c.spend_floor = r.Number("spend_floor", c.spend_floor);
  r.Finish();
  return c;
}

Json ToJson(const sim::IntroConfig& c) {
  return Json{{"periods", c.periods},
              {"cycle", c.cycle},
              {"lag", c.lag},
              {"b0", c.b0},
              {"b1", c.b1},
              {"c0", c.c0},
              {"c1", c.c1},
              {"spend_noise_sd", c.spend_noise_sd},
              {"outcome_noise_sd", c.outcome_noise_sd},
              {"spend_floor", c.spend_floor}};
}

sim::SigmoidConfig SigmoidFromJson(ObjectReader r) {
  sim::SigmoidConfig c;
  c.periods = r.Int("periods", c.periods);
  c.y_min = r.Number("y_min", c.y_min);
  c.y_max = r.Number("y_max", c.y_max);
  c.midpoint = r.Number("midpoint", c.midpoint);
  c.width = r.Number("width", c.width);
  c.noise_ratio = r.Number("noise_ratio", c.noise_ratio);
  c.spending = SpendingFromJson(r.Child("spending"), c.spending);
  r.Finish();
  return c;
}

Json ToJson(const sim::SigmoidConfig& c) {
  return Json{{"periods", c.periods}, {"y_min", c.y_min},   {"y_max", c.y_max},
              {"midpoint", c.midpoint}, {"width", c.width}, {"noise_ratio", c.noise_ratio},
              {"spending", ToJson(c.spending)}};
}

sep::LogEnvConfig LogEnvFromJson(ObjectReader r) {
  sep::LogEnvConfig c;
  c.periods = r.Int("periods", c.periods);
  c.intercept = r.Number("intercept", c.intercept);
  c.scale = r.Number("scale", c.scale);
  c.noise_sd = r.Number("noise_sd", c.noise_sd);
  c.spending = SpendingFromJson(r.Child("spending"), c.spending);
  r.Finish();
  return c;
}

Json ToJson(const sep::LogEnvConfig& c) {
  return Json{{"periods", c.periods},
              {"intercept", c.intercept},
              {"scale", c.scale},
              {"noise_sd", c.noise_sd},
              {"spending", ToJson(c.spending)}};
}

sep::SeparationConfig SeparationFromJson(ObjectReader r) {
  sep::SeparationConfig c;
  c.candidates = r.Numbers("candidates", c.candidates);
  c.policy = Enum(r, "policy", sep::ToString(c.policy), sep::PolicyFromString);
  c.test_periods = r.Int("test_periods", c.test_periods);
  c.rule = Enum(r, "rule", sep::ToString(c.rule), sep::RuleFromString);
  c.ratio = r.Number("ratio", c.ratio);
  c.inference = InferenceFromJson(r.Child("inference"));
  r.Finish();
  try {
    c.Validate();
  } catch (const DomainError& e) {
    throw SchemaError(r.path() + ": " + e.what());
  }
  return c;
}

Json ToJson(const sep::SeparationConfig& c) {
  return Json{{"candidates", c.candidates},
              {"policy", sep::ToString(c.policy)},
              {"test_periods", c.test_periods},
              {"rule", sep::ToString(c.rule)},
              {"ratio", c.ratio},
              {"inference", ToJson(c.inference)}};
}

eval::MegasimOptions MegasimOptionsFromJson(ObjectReader r) {
  eval::MegasimOptions o;
  o.master_seed = r.Seed("master_seed", o.master_seed);
  o.workers = r.Int("workers", o.workers);
  o.mode = Enum(r, "mode", "point", [](const std::string& v) {
    if (v == "point") return eval::LabelMode::kPoint;
    if (v == "interval") return eval::LabelMode::kInterval;
    throw SchemaError("expected point or interval, found '" + v + "'");
  });
  o.delta = r.Number("delta", o.delta);
  o.posterior_draws = r.Int("posterior_draws", o.posterior_draws);
  o.inference = InferenceFromJson(r.Child("inference"));
  r.Finish();
  return o;
}

Json ToJson(const eval::MegasimOptions& o) {
  return Json{{"master_seed", o.master_seed},
              {"workers", o.workers},
              {"mode", o.mode == eval::LabelMode::kPoint ? "point" : "interval"},
              {"delta", o.delta},
              {"posterior_draws", o.posterior_draws},
              {"inference", ToJson(o.inference)}};
}

theory::MonotoneDemoConfig MonotoneDemoFromJson(ObjectReader r) {
  theory::MonotoneDemoConfig c;
  c.periods = r.Int("periods", c.periods);
  c.horizon = r.Int("horizon", c.horizon);
  c.x_start = r.Number("x_start", c.x_start);
  c.x_slope = r.Number("x_slope", c.x_slope);
  c.x_noise_sd = r.Number("x_noise_sd", c.x_noise_sd);
  c.b0 = r.Number("b0", c.b0);
  c.b1 = r.Number("b1", c.b1);
  c.cycle = r.Number("cycle", c.cycle);
  c.noise_sd = r.Number("noise_sd", c.noise_sd);
  c.delta = r.Number("delta", c.delta);
  c.max_attempts = r.Int("max_attempts", c.max_attempts);
  r.Finish();
  return c;
}

Json ToJson(const theory::MonotoneDemoConfig& c) {
  return Json{{"periods", c.periods}, {"horizon", c.horizon},       {"x_start", c.x_start},
              {"x_slope", c.x_slope}, {"x_noise_sd", c.x_noise_sd}, {"b0", c.b0},
              {"b1", c.b1},           {"cycle", c.cycle},           {"noise_sd", c.noise_sd},
              {"delta", c.delta},     {"max_attempts", c.max_attempts}};
}

}  // namespace gpmmm::io
