// Copyright 2026 The RandONet Authors.
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

#include "randonet/embeddings.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "randonet/error.hpp"
#include "randonet/rng.hpp"

namespace randonet::embeddings {
namespace {

// Stream tags keep the three kinds decorrelated under a shared seed.
constexpr std::uint64_t kJLStream = 0x4a4c;
constexpr std::uint64_t kRFFNStream = 0x5246464e;
constexpr std::uint64_t kTanhStream = 0x54414e48;

constexpr const char* kMapFormat = "randonet-feature-map";
constexpr int kMapVersion = 1;

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Index j = 0; j < m.cols(); ++j) row[j] = m(i, j);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string_view kind_name(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::kJL:
      return "jl";
    case EmbeddingKind::kRFFN:
      return "rffn";
    case EmbeddingKind::kTanhRP:
      return "tanh";
  }
  return "unknown";
}

EmbeddingKind parse_kind(std::string_view name) {
  if (name == "jl" || name == "JL") return EmbeddingKind::kJL;
  if (name == "rffn" || name == "RFFN") return EmbeddingKind::kRFFN;
  if (name == "tanh" || name == "TanhRP") return EmbeddingKind::kTanhRP;
  fail(ErrorKind::kInvalidArgument,
       "unknown embedding kind '" + std::string(name) + "'");
}

void EmbeddingSpec::validate() const {
  require(input_dim >= 1 && feature_dim >= 1, ErrorKind::kInvalidArgument,
          "embedding dimensions must be at least 1");
  if (kind == EmbeddingKind::kTanhRP) {
    require(std::isfinite(domain_lo) && std::isfinite(domain_hi) &&
                domain_lo < domain_hi,
            ErrorKind::kInvalidArgument,
            "trunk domain must be a finite interval with lo < hi");
    require(std::isfinite(weight_bound), ErrorKind::kInvalidArgument,
            "trunk weight bound must be finite");
  }
  if (kind == EmbeddingKind::kRFFN) {
    require(std::isfinite(input_scale), ErrorKind::kInvalidArgument,
            "RFFN input scale must be finite");
  }
}

double EmbeddingSpec::resolved_weight_bound() const {
  if (weight_bound > 0.0) return weight_bound;
  return 25.0 / ((domain_hi - domain_lo) / 2.0);
}

double EmbeddingSpec::resolved_input_scale() const {
  if (input_scale > 0.0) return input_scale;
  return 1.0 / static_cast<double>(input_dim);
}

EmbeddingSpec jl_spec(Index input_dim, Index feature_dim, std::uint64_t seed) {
  EmbeddingSpec s;
  s.kind = EmbeddingKind::kJL;
  s.input_dim = input_dim;
  s.feature_dim = feature_dim;
  s.seed = seed;
  return s;
}

EmbeddingSpec rffn_spec(Index input_dim, Index feature_dim, std::uint64_t seed) {
  EmbeddingSpec s = jl_spec(input_dim, feature_dim, seed);
  s.kind = EmbeddingKind::kRFFN;
  return s;
}

EmbeddingSpec tanh_trunk_spec(double lo, double hi, Index feature_dim,
                              double weight_bound, std::uint64_t seed) {
  EmbeddingSpec s;
  s.kind = EmbeddingKind::kTanhRP;
  s.input_dim = 1;
  s.feature_dim = feature_dim;
  s.seed = seed;
  s.domain_lo = lo;
  s.domain_hi = hi;
  s.weight_bound = weight_bound;
  return s;
}

FeatureMap::FeatureMap(EmbeddingSpec spec, Matrix weights, Vector biases,
                       double scale, Matrix centers)
    : spec_(std::move(spec)),
      weights_(std::move(weights)),
      biases_(std::move(biases)),
      scale_(scale),
      centers_(std::move(centers)) {
  spec_.validate();
  require(weights_.rows() == spec_.feature_dim &&
              weights_.cols() == spec_.input_dim,
          ErrorKind::kShapeMismatch,
          "feature map weights must be feature_dim x input_dim");
  const bool has_bias = spec_.kind != EmbeddingKind::kJL;
  require(biases_.size() == (has_bias ? spec_.feature_dim : 0),
          ErrorKind::kShapeMismatch,
          "feature map biases must have feature_dim entries (none for JL)");
  require(weights_.allFinite() && biases_.allFinite() && std::isfinite(scale_),
          ErrorKind::kNonFinite, "feature map parameters must be finite");
}

FeatureMap FeatureMap::with_biases(Vector biases) const {
  return FeatureMap(spec_, weights_, std::move(biases), scale_, centers_);
}

void FeatureMap::apply_column(const Eigen::Ref<const Vector>& x,
                              Eigen::Ref<Vector> out) const {
  out.noalias() = weights_ * x;
  switch (spec_.kind) {
    case EmbeddingKind::kJL:
      out *= scale_;
      break;
    case EmbeddingKind::kRFFN: {
      const double g = spec_.resolved_input_scale();
      for (Index i = 0; i < out.size(); ++i) {
        out(i) = scale_ * std::cos(g * out(i) + biases_(i));
      }
      break;
    }
    case EmbeddingKind::kTanhRP:
      for (Index i = 0; i < out.size(); ++i) {
        out(i) = std::tanh(out(i) + biases_(i));
      }
      break;
  }
}

Matrix FeatureMap::apply(const Matrix& x) const {
  if (x.rows() != spec_.input_dim) {
    fail(ErrorKind::kShapeMismatch,
         "feature map expects inputs of dimension " +
             std::to_string(spec_.input_dim) + ", got " +
             std::to_string(x.rows()));
  }
  Matrix out(spec_.feature_dim, x.cols());
  for (Index j = 0; j < x.cols(); ++j) apply_column(x.col(j), out.col(j));
  return out;
}

Vector FeatureMap::apply_one(const Vector& x) const {
  return apply(Matrix(x)).col(0);
}

FeatureMap sample_jl(Index input_dim, Index feature_dim, std::uint64_t seed) {
  return sample(jl_spec(input_dim, feature_dim, seed));
}

FeatureMap sample_rffn(Index input_dim, Index feature_dim, std::uint64_t seed) {
  return sample(rffn_spec(input_dim, feature_dim, seed));
}

FeatureMap sample_tanh_trunk(double lo, double hi, Index feature_dim,
                             double weight_bound, std::uint64_t seed) {
  return sample(tanh_trunk_spec(lo, hi, feature_dim, weight_bound, seed));
}

FeatureMap sample(const EmbeddingSpec& spec) {
  spec.validate();
  const Index rows = spec.feature_dim;
  const Index cols = spec.input_dim;
  Matrix weights(rows, cols);

  switch (spec.kind) {
    case EmbeddingKind::kJL: {
      Rng rng = Rng::for_stream(spec.seed, kJLStream);
      for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) weights(i, j) = rng.gaussian();
      const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
      return FeatureMap(spec, std::move(weights), Vector(), scale);
    }
    case EmbeddingKind::kRFFN: {
      Rng rng = Rng::for_stream(spec.seed, kRFFNStream);
      for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) weights(i, j) = rng.gaussian();
      Vector biases(rows);
      for (Index i = 0; i < rows; ++i) {
        biases(i) = rng.uniform(0.0, 2.0 * std::numbers::pi);
      }
      double scale = std::sqrt(2.0 / static_cast<double>(rows));
      if (spec.output_inverse_m) scale /= static_cast<double>(cols);
      return FeatureMap(spec, std::move(weights), std::move(biases), scale);
    }
    case EmbeddingKind::kTanhRP: {
      Rng rng = Rng::for_stream(spec.seed, kTanhStream);
      const double bound = spec.resolved_weight_bound();
      Matrix centers(rows, cols);
      Vector biases(rows);
      for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) weights(i, j) = rng.uniform(-bound, bound);
        for (Index j = 0; j < cols; ++j) {
          centers(i, j) = rng.uniform(spec.domain_lo, spec.domain_hi);
        }
        biases(i) = -(weights.row(i) * centers.row(i).transpose()).value();
      }
      return FeatureMap(spec, std::move(weights), std::move(biases), 1.0,
                        std::move(centers));
    }
  }
  fail(ErrorKind::kInvalidArgument, "unknown embedding kind");
}

nlohmann::json spec_to_json(const EmbeddingSpec& spec) {
  nlohmann::json j;
  j["kind"] = std::string(kind_name(spec.kind));
  j["input_dim"] = spec.input_dim;
  j["feature_dim"] = spec.feature_dim;
  j["seed"] = spec.seed;
  if (spec.kind == EmbeddingKind::kTanhRP) {
    j["weight_bound"] = spec.resolved_weight_bound();
    j["domain"] = {spec.domain_lo, spec.domain_hi};
  }
  if (spec.kind == EmbeddingKind::kRFFN) {
    j["input_scale"] = spec.resolved_input_scale();
    j["output_inverse_m"] = spec.output_inverse_m;
  }
  return j;
}

EmbeddingSpec spec_from_json(const nlohmann::json& j) {
  try {
    EmbeddingSpec s;
    s.kind = parse_kind(j.at("kind").get<std::string>());
    s.input_dim = j.at("input_dim").get<Index>();
    s.feature_dim = j.at("feature_dim").get<Index>();
    s.seed = j.at("seed").get<std::uint64_t>();
    if (s.kind == EmbeddingKind::kTanhRP) {
      s.weight_bound = j.at("weight_bound").get<double>();
      s.domain_lo = j.at("domain").at(0).get<double>();
      s.domain_hi = j.at("domain").at(1).get<double>();
    }
    if (s.kind == EmbeddingKind::kRFFN) {
      s.input_scale = j.at("input_scale").get<double>();
      s.output_inverse_m = j.at("output_inverse_m").get<bool>();
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kIo, std::string("malformed embedding spec: ") + e.what());
  }
}

void save_feature_map(std::ostream& os, const FeatureMap& map,
                      bool include_weights) {
  nlohmann::json j;
  j["format"] = kMapFormat;
  j["version"] = kMapVersion;
  j["spec"] = spec_to_json(map.spec());
  j["scale"] = map.scale();
  if (include_weights) {
    j["weights"] = matrix_to_json(map.weights());
    j["biases"] = std::vector<double>(map.biases().data(),
                                      map.biases().data() + map.biases().size());
  }
  os << j.dump() << "\n";
}

FeatureMap load_feature_map(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kIo, std::string("cannot parse feature map: ") + e.what());
  }
  require(j.value("format", "") == kMapFormat, ErrorKind::kIo,
          "not a randonet feature map file");
  require(j.value("version", 0) == kMapVersion, ErrorKind::kIo,
          "unsupported feature map version");
  FeatureMap map = sample(spec_from_json(j.at("spec")));
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    bool same = w.size() == static_cast<std::size_t>(map.feature_dim());
    for (Index i = 0; same && i < map.feature_dim(); ++i) {
      const auto& row = w.at(i);
      same = row.size() == static_cast<std::size_t>(map.input_dim());
      for (Index k = 0; same && k < map.input_dim(); ++k) {
        same = row.at(k).get<double>() == map.weights()(i, k);
      }
    }
    const auto b = j.value("biases", std::vector<double>{});
    same = same && b.size() == static_cast<std::size_t>(map.biases().size());
    for (Index i = 0; same && i < map.biases().size(); ++i) {
      same = b[i] == map.biases()(i);
    }
    require(same, ErrorKind::kInvalidArgument,
            "stored feature map weights do not match the map regenerated "
            "from its seed");
  }
  return map;
}

}  // namespace randonet::embeddings
