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

// Frozen random feature maps.
//
//   JL      phi(x) = M^-1/2 R x,                         R_ij ~ N(0, 1)
//   RFFN    phi(u) = c sqrt(2/M) cos(g R u + b),         R_ij ~ N(0, 1),
//                                                        b_i ~ U[0, 2 pi]
//   TanhRP  phi(y) = tanh(alpha y + beta),               alpha_k ~ U[-a_U, a_U],
//                                                        beta_k = -alpha_k y_k,
//                                                        y_k ~ U[a, b]
//
// For RFFN, c is 1/m by default (m = input dimension) and g is the input
// scale, also 1/m by default, so the argument of the cosine is a Riemann-sum
// approximation of an integral of the random weight function against u.
// With g = 1 the map approximates the Gaussian kernel exp(-|u - v|^2 / 2) up
// to the factor c^2.
//
// Sampling order is fixed: weights row by row, then biases (RFFN), or for
// TanhRP per neuron: weight then center. All draws come from
// Rng::for_stream(seed, kind tag).

#ifndef RANDONET_EMBEDDINGS_HPP_
#define RANDONET_EMBEDDINGS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "randonet/linalg.hpp"

namespace randonet::embeddings {

using linalg::Index;
using linalg::Matrix;
using linalg::Vector;

enum class EmbeddingKind { kJL, kRFFN, kTanhRP };

std::string_view kind_name(EmbeddingKind kind);
EmbeddingKind parse_kind(std::string_view name);

struct EmbeddingSpec {
  EmbeddingKind kind = EmbeddingKind::kJL;
  Index input_dim = 1;
  Index feature_dim = 1;
  std::uint64_t seed = 0;

  // TanhRP only. A non-positive weight_bound selects the default
  // 25 / ((domain_hi - domain_lo) / 2).
  double weight_bound = 0.0;
  double domain_lo = 0.0;
  double domain_hi = 1.0;

  // RFFN only. A non-positive input_scale selects 1 / input_dim.
  double input_scale = 0.0;
  // RFFN only: include the 1/m factor in front of the cosine.
  bool output_inverse_m = true;

  void validate() const;
  double resolved_weight_bound() const;
  double resolved_input_scale() const;

  bool operator==(const EmbeddingSpec&) const = default;
};

EmbeddingSpec jl_spec(Index input_dim, Index feature_dim, std::uint64_t seed);
EmbeddingSpec rffn_spec(Index input_dim, Index feature_dim, std::uint64_t seed);
EmbeddingSpec tanh_trunk_spec(double lo, double hi, Index feature_dim,
                              double weight_bound, std::uint64_t seed);

/// Immutable sampled feature map. apply() never mutates state, so one map
/// can be shared across threads.
class FeatureMap {
 public:
  /// Assemble a map from explicit parts (deserialization, test hooks).
  FeatureMap(EmbeddingSpec spec, Matrix weights, Vector biases, double scale,
             Matrix centers = Matrix());

  const EmbeddingSpec& spec() const { return spec_; }
  EmbeddingKind kind() const { return spec_.kind; }
  Index input_dim() const { return spec_.input_dim; }
  Index feature_dim() const { return spec_.feature_dim; }
  const Matrix& weights() const { return weights_; }
  const Vector& biases() const { return biases_; }
  double scale() const { return scale_; }
  /// TanhRP neuron centers, feature_dim x input_dim (empty otherwise).
  const Matrix& centers() const { return centers_; }

  /// Columns of `x` are inputs; returns feature_dim x x.cols(). Columns are
  /// processed independently, so the result for a column does not depend on
  /// the rest of the batch.
  Matrix apply(const Matrix& x) const;
  Vector apply_one(const Vector& x) const;

  FeatureMap with_biases(Vector biases) const;

 private:
  void apply_column(const Eigen::Ref<const Vector>& x,
                    Eigen::Ref<Vector> out) const;

  EmbeddingSpec spec_;
  Matrix weights_;
  Vector biases_;
  double scale_;
  Matrix centers_;
};

FeatureMap sample_jl(Index input_dim, Index feature_dim, std::uint64_t seed);
FeatureMap sample_rffn(Index input_dim, Index feature_dim, std::uint64_t seed);
FeatureMap sample_tanh_trunk(double lo, double hi, Index feature_dim,
                             double weight_bound, std::uint64_t seed);
/// Dispatches on spec.kind; honours every hyperparameter in the spec.
FeatureMap sample(const EmbeddingSpec& spec);

nlohmann::json spec_to_json(const EmbeddingSpec& spec);
EmbeddingSpec spec_from_json(const nlohmann::json& j);

/// Versioned JSON: {"format": "randonet-feature-map", "version": 1, "spec":
/// {...}, "scale": ..., optional "weights"/"biases"}. Weights are only
/// needed for cross-implementation checks; the spec alone reproduces the map.
void save_feature_map(std::ostream& os, const FeatureMap& map,
                      bool include_weights);
/// Rebuilds from the spec and, when weights are present, verifies they match
/// the regenerated map bit for bit (kInvalidArgument otherwise).
FeatureMap load_feature_map(std::istream& is);

}  // namespace randonet::embeddings

#endif  // RANDONET_EMBEDDINGS_HPP_
