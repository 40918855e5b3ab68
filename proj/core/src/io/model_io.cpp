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

#include "gpmmm/io/model_io.hpp"

#include "gpmmm/error.hpp"

namespace gpmmm::io {
namespace {

constexpr const char* kModelDocument = "gpmmm.model";

Json Columns(const std::vector<Column>& cols) {
  Json out = Json::array();
  for (const Column& c : cols) out.push_back(Json{{"name", c.name}, {"values", c.values}});
  return out;
}

std::vector<Column> ColumnsFromJson(ObjectReader& r, const std::string& key) {
  std::vector<Column> out;
  if (!r.Has(key)) return out;
  const Json& arr = r.Raw(key);
  if (!arr.is_array()) throw SchemaError(r.PathOf(key) + ": expected an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    ObjectReader c(arr[i], r.PathOf(key) + "[" + std::to_string(i) + "]");
    Column col;
    col.name = c.String("name", "");
    col.values = c.Numbers("values", {});
    c.Finish();
    if (col.name.empty()) throw SchemaError(c.PathOf("name") + ": required");
    out.push_back(std::move(col));
  }
  return out;
}

}  // namespace

Json ToJson(const Dataset& d) {
  Json j{{"periods", d.periods}, {"outcome", d.outcome}};
  j["channels"] = Columns(d.channels);
  j["dummies"] = Columns(d.dummies);
  j["dates"] = d.dates;
  j["signed_spend"] = d.signed_spend;
  return j;
}

Dataset DatasetFromJson(ObjectReader r) {
  Dataset d;
  const std::vector<double> periods = r.Numbers("periods", {});
  for (double p : periods) {
    if (p != static_cast<int>(p)) throw SchemaError(r.PathOf("periods") + ": periods must be integers");
    d.periods.push_back(static_cast<int>(p));
  }
  d.outcome = r.Numbers("outcome", {});
  d.channels = ColumnsFromJson(r, "channels");
  d.dummies = ColumnsFromJson(r, "dummies");
  d.dates = r.Strings("dates", {});
  d.signed_spend = r.Bool("signed_spend", false);
  r.Finish();
  try {
    d.Validate();
  } catch (const SchemaError& e) {
    throw SchemaError(r.path() + ": " + e.what());
  }
  return d;
}

Json ModelToJson(const mmm::FittedModel& m) {
  Json j{{"schema_version", kSchemaVersion}, {"document", kModelDocument}};
  j["spec"] = ToJson(m.spec);
  j["data"] = ToJson(m.data);
  Json h{{"provenance", m.hypers.provenance == gp::HyperDraws::Provenance::kMetropolis ? "metropolis" : "point"},
         {"param_names", m.param_names},
         {"draws", m.hypers.draws},
         {"acceptance_rate", m.hypers.acceptance_rate},
         {"proposal_scale", m.hypers.proposal_scale}};
  j["hyperparameters"] = h;
  if (m.hill) {
    j["hill"] = Json{{"coefficients", m.hill->coefficients},
                     {"amplitude", m.hill->amplitude},
                     {"k", m.hill->k},
                     {"s", m.hill->s},
                     {"sigma", m.hill->sigma},
                     {"rss", m.hill->rss}};
  } else {
    j["hill"] = nullptr;
  }
  j["notes"] = m.notes;
  return j;
}

mmm::FittedModel ModelFromJson(const Json& j, const std::string& source) {
  ObjectReader r(j, source);
  CheckSchemaVersion(r);
  if (r.String("document", "") != kModelDocument)
    throw SchemaError(r.PathOf("document") + ": not a saved model (expected '" + kModelDocument + "')");
  const mmm::ModelSpec spec = ModelSpecFromJson(r.Child("spec"));
  const Dataset data = DatasetFromJson(r.Child("data"));

  ObjectReader h = r.Child("hyperparameters");
  gp::HyperDraws hypers;
  const std::string prov = h.String("provenance", "point");
  if (prov != "point" && prov != "metropolis")
    throw SchemaError(h.PathOf("provenance") + ": expected point or metropolis");
  hypers.provenance =
      prov == "metropolis" ? gp::HyperDraws::Provenance::kMetropolis : gp::HyperDraws::Provenance::kPointEstimate;
  const std::vector<std::string> names = h.Strings("param_names", {});
  const Json& draws = h.Raw("draws");
  if (!draws.is_array()) throw SchemaError(h.PathOf("draws") + ": expected an array of arrays");
  for (std::size_t i = 0; i < draws.size(); ++i) {
    std::vector<double> d;
    if (!draws[i].is_array()) throw SchemaError(h.PathOf("draws") + "[" + std::to_string(i) + "]: expected an array");
    for (const Json& v : draws[i]) {
      if (!v.is_number()) throw SchemaError(h.PathOf("draws") + "[" + std::to_string(i) + "]: expected numbers");
      d.push_back(v.get<double>());
    }
    hypers.draws.push_back(std::move(d));
  }
  hypers.acceptance_rate = h.Number("acceptance_rate", 1.0);
  hypers.proposal_scale = h.Number("proposal_scale", 0.0);
  h.Finish();

  std::optional<mmm::HillEstimate> hill;
  if (r.Has("hill") && !r.Raw("hill").is_null()) {
    ObjectReader e = r.Child("hill");
    mmm::HillEstimate est;
    est.coefficients = e.Numbers("coefficients", {});
    est.amplitude = e.Number("amplitude", est.amplitude);
    est.k = e.Number("k", est.k);
    est.s = e.Number("s", est.s);
    est.sigma = e.Number("sigma", est.sigma);
    est.rss = e.Number("rss", est.rss);
    e.Finish();
    hill = est;
  }
  const std::vector<std::string> notes = r.Strings("notes", {});
  r.Finish();

  if (spec.kind != mmm::ModelKind::kHillParametric)
    for (const auto& d : hypers.draws)
      if (d.size() != names.size()) throw SchemaError(h.PathOf("draws") + ": draw length does not match param_names");

  mmm::FittedModel m;
  try {
    m = mmm::Rebuild(data, spec, hypers, hill);
  } catch (const DomainError& e) {
    throw SchemaError(source + ": " + e.what());
  }
  if (m.param_names != names) throw SchemaError(h.PathOf("param_names") + ": does not match the model family");
  m.notes = notes;
  return m;
}

void SaveModel(const mmm::FittedModel& m, const std::string& path) { WriteJson(path, ModelToJson(m)); }

mmm::FittedModel LoadModel(const std::string& path) { return ModelFromJson(ReadJson(path), path); }

}  // namespace gpmmm::io
