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

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "oracles/reference.hpp"
#include "randonet/error.hpp"
#include "randonet/problems.hpp"
#include "randonet/model.hpp"

namespace randonet::model {
namespace {

using embeddings::jl_spec;
using embeddings::rffn_spec;
using embeddings::tanh_trunk_spec;
using oracles::gaussian_matrix;

AlignedDataset case_data(int id, Index size, std::uint64_t seed = 0) {
  return problems::build_case(problems::case_study(id, seed, size)).dataset;
}

EmbeddingSpec trunk_for(const AlignedDataset& ds, Index n_feat, std::uint64_t seed = 0) {
  return tanh_trunk_spec(ds.output_grid(0), ds.output_grid(ds.output_grid.size() - 1),
                         n_feat, 0.0, seed);
}

double rel(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

AlignedDataset tiny(Index m, Index n, Index s, std::uint64_t seed) {
  AlignedDataset ds;
  ds.input_grid = funcgen::equispaced(0.0, 1.0, m);
  ds.output_grid = funcgen::equispaced(-1.0, 1.0, n);
  ds.inputs = gaussian_matrix(m, s, seed);
  ds.outputs = gaussian_matrix(n, s, seed + 1);
  return ds;
}

TEST(Aligned, ZeroTargetsGiveZeroReadout) {
  AlignedDataset ds = tiny(6, 9, 12, 1);
  ds.outputs.setZero();
  const auto m = train_aligned(ds, trunk_for(ds, 5), jl_spec(6, 4, 0));
  EXPECT_EQ(m.readout().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Aligned, IdentityFeaturesReturnTargets) {
  const Matrix v = gaussian_matrix(4, 3, 2);
  const auto sol = solve_readout(Matrix::Identity(4, 4), v, Matrix::Identity(3, 3));
  EXPECT_LE(rel(sol.readout, v), 1e-15);
  EXPECT_EQ(sol.trunk_rank, 4);
  EXPECT_EQ(sol.branch_rank, 3);
}

TEST(Aligned, TrainedModelEvaluatesTheDefiningFormula) {
  const AlignedDataset ds = tiny(7, 11, 20, 3);
  const auto model = train_aligned(ds, trunk_for(ds, 6), rffn_spec(7, 5, 1));
  const Vector u = ds.inputs.col(4);
  Vector y(3);
  y << -0.9, 0.05, 0.7;
  const Vector out = model.evaluate(u, y);
  const Vector bu = model.branch().apply_one(u);
  for (Index q = 0; q < 3; ++q) {
    double direct = 0.0;
    for (Index k = 0; k < 6; ++k) {
      const double tk = std::tanh(model.trunk().weights()(k, 0) * y(q) +
                                  model.trunk().biases()(k));
      for (Index i = 0; i < 5; ++i) direct += model.readout()(k, i) * tk * bu(i);
    }
    EXPECT_NEAR(out(q), direct, 1e-13 * std::max(1.0, std::abs(direct)));
  }
  const Matrix batch = model.evaluate_batch(ds.inputs, ds.output_grid);
  for (Index j = 0; j < ds.size(); ++j)
    EXPECT_EQ(batch.col(j), model.evaluate(ds.inputs.col(j), ds.output_grid));
}

TEST(Aligned, AntiderivativeFitsTrainingData) {
  const AlignedDataset ds = case_data(1, 300, 2);
  const auto model = train_aligned(ds, trunk_for(ds, 200), jl_spec(100, 100, 0));
  const Matrix pred = model.evaluate_batch(ds.inputs, ds.output_grid);
  double sq = 0.0;
  for (Index j = 0; j < ds.size(); ++j) {
    double col = 0.0;
    for (Index k = 0; k < ds.outputs.rows(); ++k) {
      const double e = pred(k, j) - ds.outputs(k, j);
      col += e * e;
    }
    sq += col;
    EXPECT_LE(std::sqrt(col), 1e-6) << "function " << j;
  }
  EXPECT_LE(sq / static_cast<double>(ds.outputs.size()), 1e-14);
  EXPECT_EQ(model.metadata().route, "aligned");
  EXPECT_EQ(model.metadata().train_size, 300);
  EXPECT_TRUE(model.metadata().trunk_first);
}

TEST(Aligned, IdentityOperatorReproducesTrainingColumn) {
  AlignedDataset ds;
  ds.input_grid = funcgen::equispaced(0.0, 1.0, 20);
  ds.output_grid = ds.input_grid;
  ds.inputs = gaussian_matrix(20, 40, 6);
  ds.outputs = ds.inputs;
  const auto model = train_aligned(ds, trunk_for(ds, 20), jl_spec(20, 20, 2));
  for (Index j : {0, 17, 39}) {
    const Vector pred = model.evaluate(ds.inputs.col(j), ds.output_grid);
    EXPECT_LE((pred - ds.inputs.col(j)).norm(), 1e-8) << "column " << j;
  }
}

TEST(Aligned, AntiderivativeGeneralizesToHeldOutFunctions) {
  const AlignedDataset all = case_data(1, 1000, 0);
  std::vector<Index> first(800), rest(200);
  std::iota(first.begin(), first.end(), Index{0});
  std::iota(rest.begin(), rest.end(), Index{800});
  const AlignedDataset train = all.select(first), test = all.select(rest);
  const auto model = train_aligned(train, trunk_for(train, 200), jl_spec(100, 100, 0));
  const Matrix pred = model.evaluate_batch(test.inputs, test.output_grid);
  std::vector<double> l2;
  for (Index j = 0; j < test.size(); ++j)
    l2.push_back((pred.col(j) - test.outputs.col(j)).norm());
  std::sort(l2.begin(), l2.end());
  EXPECT_LE(l2[l2.size() / 2], 1e-8);
  EXPECT_LE((pred.col(0) - test.outputs.col(0)).norm(), 1e-8);
}

TEST(Aligned, SpecShapeMismatchRejected) {
  const AlignedDataset ds = tiny(6, 9, 12, 1);
  try {
    train_aligned(ds, trunk_for(ds, 5), jl_spec(7, 4, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShapeMismatch);
  }
}

TEST(Aligned, NonIncreasingGridRejected) {
  AlignedDataset ds = tiny(6, 9, 12, 1);
  std::swap(ds.output_grid(2), ds.output_grid(3));
  EXPECT_THROW(train_aligned(ds, trunk_for(ds, 5), jl_spec(6, 4, 0)), Error);
}

TEST(Aligned, HugeTargetsRaiseSolverFailure) {
  AlignedDataset ds = tiny(6, 30, 12, 1);
  ds.outputs.setConstant(1e308);
  try {
    train_aligned(ds, trunk_for(ds, 25), jl_spec(6, 4, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSolverFailure);
    EXPECT_NE(std::string(e.what()).find("rank"), std::string::npos);
  }
}

TEST(Unaligned, SingleObservationClosedForm) {
  UnalignedDataset ds;
  ds.inputs = gaussian_matrix(4, 1, 5);
  ds.locations = Matrix::Constant(1, 1, 0.3);
  ds.outputs = Vector::Constant(1, 2.5);
  const auto model = train_unaligned(ds, tanh_trunk_spec(0.0, 1.0, 3, 0.0, 0),
                                     jl_spec(4, 2, 0));
  const Vector t = model.trunk().apply(ds.locations).col(0);
  const Vector b = model.branch().apply_one(ds.inputs.col(0));
  const double denom = t.squaredNorm() * b.squaredNorm();
  for (Index k = 0; k < 3; ++k)
    for (Index i = 0; i < 2; ++i)
      EXPECT_NEAR(model.readout()(k, i), 2.5 * t(k) * b(i) / denom, 1e-12);
  EXPECT_NEAR(model.evaluate(ds.inputs.col(0), ds.locations.row(0).transpose())(0), 2.5,
              1e-12);
}

TEST(Unaligned, ZeroOutputsGiveZeroReadout) {
  UnalignedDataset ds;
  ds.inputs = gaussian_matrix(3, 10, 6);
  ds.locations = gaussian_matrix(1, 10, 7);
  ds.outputs = Vector::Zero(10);
  const auto model =
      train_unaligned(ds, tanh_trunk_spec(-2.0, 2.0, 4, 0.0, 0), jl_spec(3, 3, 0));
  EXPECT_EQ(model.readout().norm(), 0.0);
  EXPECT_EQ(model.metadata().route, "unaligned");
}

TEST(Unaligned, AgreesWithAlignedRouteOnExplodedData) {
  auto cs = problems::case_study(3, 0, 5);
  cs.m = 10;
  cs.n = 10;
  const AlignedDataset ds = problems::build_case(cs).dataset;
  const auto trunk = trunk_for(ds, 8);
  const auto branch = jl_spec(10, 8, 0);
  const auto a = train_aligned(ds, trunk, branch);
  const auto u = train_unaligned(explode_aligned(ds), trunk, branch);
  EXPECT_LE(rel(u.readout(), a.readout()), 1e-8);
  const Matrix pa = a.evaluate_batch(ds.inputs, ds.output_grid);
  const Matrix pu = u.evaluate_batch(ds.inputs, ds.output_grid);
  EXPECT_LE(rel(pu, pa), 1e-8);
}

TEST(Unaligned, BudgetGuard) {
  UnalignedDataset ds;
  ds.inputs = gaussian_matrix(3, 50, 8);
  ds.locations = gaussian_matrix(1, 50, 9);
  ds.outputs = Vector::Ones(50);
  try {
    train_unaligned(ds, tanh_trunk_spec(-3.0, 3.0, 10, 0.0, 0), jl_spec(3, 10, 0), {},
                    4999);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBudgetExceeded);
    EXPECT_NE(std::string(e.what()).find("10*10*50"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(train_unaligned(ds, tanh_trunk_spec(-3.0, 3.0, 10, 0.0, 0),
                                  jl_spec(3, 10, 0), {}, 5000));
}

TEST(Explode, LayoutOfObservations) {
  AlignedDataset ds;
  ds.input_grid = funcgen::equispaced(0.0, 1.0, 2);
  ds.output_grid = funcgen::equispaced(0.0, 1.0, 3);
  ds.inputs.resize(2, 2);
  ds.inputs << 1, 2, 3, 4;
  ds.outputs.resize(3, 2);
  ds.outputs << 10, 20, 11, 21, 12, 22;
  const UnalignedDataset ex = explode_aligned(ds);
  ASSERT_EQ(ex.size(), 6);
  Vector expected(6);
  expected << 10, 11, 12, 20, 21, 22;
  EXPECT_EQ(ex.outputs, expected);
  EXPECT_EQ(ex.locations(0, 4), 0.5);
  EXPECT_EQ(ex.inputs.col(4), ds.inputs.col(1));
  EXPECT_EQ(ex.inputs.col(0), ds.inputs.col(0));
}

TEST(ModelProperty, OneHotReadoutIsProductOfFeatures) {
  const FeatureMap trunk = embeddings::sample(tanh_trunk_spec(0.0, 1.0, 4, 0.0, 1));
  const FeatureMap branch = embeddings::sample(rffn_spec(5, 3, 2));
  const Matrix u = gaussian_matrix(5, 1, 3);
  const Vector y = funcgen::equispaced(0.0, 1.0, 6);
  const Matrix ty = trunk.apply(y.transpose());
  const Vector bu = branch.apply_one(u.col(0));
  for (Index k = 0; k < 4; ++k) {
    for (Index i = 0; i < 3; ++i) {
      Matrix w = Matrix::Zero(4, 3);
      w(k, i) = 1.0;
      const RandONetModel m(trunk, branch, w);
      const Vector out = m.evaluate(u.col(0), y);
      for (Index q = 0; q < y.size(); ++q)
        EXPECT_NEAR(out(q), ty(k, q) * bu(i), 1e-15);
    }
  }
}

TEST(ModelProperty, OutputIsLinearInReadout) {
  const FeatureMap trunk = embeddings::sample(tanh_trunk_spec(0.0, 1.0, 6, 0.0, 1));
  const FeatureMap branch = embeddings::sample(jl_spec(5, 4, 2));
  const Matrix w1 = gaussian_matrix(6, 4, 4), w2 = gaussian_matrix(6, 4, 5);
  const Matrix u = gaussian_matrix(5, 7, 6);
  const Vector y = funcgen::equispaced(0.0, 1.0, 9);
  const RandONetModel m1(trunk, branch, w1), m2(trunk, branch, w2);
  const RandONetModel m12 = m1.with_readout(2.0 * w1 - 3.0 * w2);
  const Matrix lhs = m12.evaluate_batch(u, y);
  const Matrix rhs = 2.0 * m1.evaluate_batch(u, y) - 3.0 * m2.evaluate_batch(u, y);
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-13 * rhs.cwiseAbs().maxCoeff());
}

TEST(ModelProperty, SolversAgreeOnAllCases) {
  for (int id = 1; id <= 5; ++id) {
    const AlignedDataset ds = case_data(id, 150, 1);
    const auto kind = id == 1 || id == 3 ? embeddings::EmbeddingKind::kJL
                                         : embeddings::EmbeddingKind::kRFFN;
    EmbeddingSpec branch = kind == embeddings::EmbeddingKind::kJL ? jl_spec(100, 60, 0)
                                                                   : rffn_spec(100, 60, 0);
    SolverOptions cod, tsvd;
    tsvd.kind = SolverKind::kTsvd;
    const auto a = train_aligned(ds, trunk_for(ds, 200), branch, cod);
    const auto b = train_aligned(ds, trunk_for(ds, 200), branch, tsvd);
    const Matrix pa = a.evaluate_batch(ds.inputs, ds.output_grid);
    const Matrix pb = b.evaluate_batch(ds.inputs, ds.output_grid);
    EXPECT_LE(rel(pa, pb), 1e-6) << "case " << id;
  }
}

struct Features {
  Matrix t;  // n x N
  Matrix b;  // M x s
  Matrix v;  // n x s
};

Features features(int id, Index size, Index n_feat, Index m_feat) {
  const AlignedDataset ds = case_data(id, size, 3);
  const FeatureMap trunk = embeddings::sample(trunk_for(ds, n_feat));
  const FeatureMap branch = embeddings::sample(
      id == 1 || id == 3 ? jl_spec(100, m_feat, 0) : rffn_spec(100, m_feat, 0));
  return {trunk.apply(ds.output_grid.transpose()).transpose(), branch.apply(ds.inputs),
          ds.outputs};
}

// sigma_max / sigma_r over the singular values kept by the solve.
double kept_condition(const Matrix& a, Index rank) {
  const Vector sv = oracles::jacobi_singular_values(a);
  return sv(0) / sv(rank - 1);
}

Features permuted_rows(const Features& f, std::uint64_t seed) {
  std::vector<Index> perm(static_cast<std::size_t>(f.t.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(seed));
  Features p = f;
  for (Index r = 0; r < f.t.rows(); ++r) {
    p.t.row(r) = f.t.row(perm[static_cast<std::size_t>(r)]);
    p.v.row(r) = f.v.row(perm[static_cast<std::size_t>(r)]);
  }
  return p;
}

// Both orders and any row ordering evaluate the same product T^+ V B^+; the
// computed results differ only by rounding, which grows like
// eps kappa(T) kappa(B).
void expect_same_readout(const Features& f, double tol, bool scale_by_condition) {
  for (SolverKind kind : {SolverKind::kCod, SolverKind::kTsvd}) {
    SolverOptions opt;
    opt.kind = kind;
    const auto a = solve_readout(f.t, f.v, f.b, opt, Association::kTrunkFirst);
    const auto b = solve_readout(f.t, f.v, f.b, opt, Association::kBranchFirst);
    const Features p = permuted_rows(f, 99);
    const auto c = solve_readout(p.t, p.v, p.b, opt);
    EXPECT_TRUE(a.trunk_first);
    EXPECT_FALSE(b.trunk_first);
    double bound = tol;
    if (scale_by_condition) {
      bound *= std::numeric_limits<double>::epsilon() *
               kept_condition(f.t, a.trunk_rank) * kept_condition(f.b, a.branch_rank);
    }
    const Matrix pa = f.t * a.readout * f.b;
    EXPECT_LE(rel(f.t * b.readout * f.b, pa), bound) << solver_name(kind);
    EXPECT_LE(rel(f.t * c.readout * f.b, pa), bound) << solver_name(kind);
  }
}

TEST(ModelProperty, AssociationAndRowOrderAgreeOnWellConditionedFeatures) {
  expect_same_readout(features(1, 80, 200, 50), 1e-10, false);
  expect_same_readout(features(1, 400, 200, 100), 1e-10, false);
}

TEST(ModelProperty, AssociationAndRowOrderAgreeUpToConditioning) {
  for (int id : {1, 3, 4, 5})
    for (Index n_feat : {40, 80, 120, 200}) expect_same_readout(features(id, 80, n_feat, 50), 10.0, true);
}

TEST(ModelProperty, BurgersRffnSolversAgreeOnFullDataset) {
  const AlignedDataset ds = case_data(4, 0);
  ASSERT_EQ(ds.size(), 2000);
  SolverOptions tsvd;
  tsvd.kind = SolverKind::kTsvd;
  const auto a = train_aligned(ds, trunk_for(ds, 200), rffn_spec(100, 100, 0));
  const auto b = train_aligned(ds, trunk_for(ds, 200), rffn_spec(100, 100, 0), tsvd);
  const Matrix pa = a.evaluate_batch(ds.inputs, ds.output_grid);
  const Matrix pb = b.evaluate_batch(ds.inputs, ds.output_grid);
  EXPECT_LE(rel(pa, pb), 1e-6);
  EXPECT_LE(rel(a.readout(), b.readout()), 1e-6);
}

TEST(ModelProperty, TikhonovWithTinyLambdaTracksCod) {
  const AlignedDataset ds = case_data(1, 100, 5);
  SolverOptions tk;
  tk.kind = SolverKind::kTikhonov;
  tk.lambda = 1e-13;
  const auto a = train_aligned(ds, trunk_for(ds, 60), jl_spec(100, 40, 0));
  const auto b = train_aligned(ds, trunk_for(ds, 60), jl_spec(100, 40, 0), tk);
  EXPECT_LE(rel(b.evaluate_batch(ds.inputs, ds.output_grid),
                a.evaluate_batch(ds.inputs, ds.output_grid)),
            1e-6);
  EXPECT_EQ(b.metadata().lambda, 1e-13);
}

TEST(Serialization, RoundTripIsBitwise) {
  const AlignedDataset ds = case_data(5, 40, 1);
  auto tol = SolverOptions{};
  tol.tolerance = linalg::RankTolerance::absolute(1e-11);
  const auto model = train_aligned(ds, trunk_for(ds, 30, 4), rffn_spec(100, 20, 9), tol);
  std::stringstream ss;
  save_model(ss, model);
  const RandONetModel back = load_model(ss);
  EXPECT_EQ(back.readout(), model.readout());
  EXPECT_EQ(embeddings::spec_to_json(back.trunk().spec()),
            embeddings::spec_to_json(model.trunk().spec()));
  EXPECT_EQ(embeddings::spec_to_json(back.branch().spec()),
            embeddings::spec_to_json(model.branch().spec()));
  EXPECT_EQ(back.metadata().tolerance, model.metadata().tolerance);
  EXPECT_EQ(back.metadata().branch_seed, 9u);
  EXPECT_EQ(back.evaluate_batch(ds.inputs, ds.output_grid),
            model.evaluate_batch(ds.inputs, ds.output_grid));
}

TEST(Serialization, BadFilesAreIoErrors) {
  for (const char* text : {"not json", "{\"format\": \"randonet-model\", \"version\": 99}",
                           "{\"format\": \"randonet-model\", \"version\": 1}"}) {
    std::stringstream ss(text);
    try {
      load_model(ss);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kIo) << text;
    }
  }
}

TEST(Solver, NamesAndOptions) {
  EXPECT_EQ(parse_solver("tsvd"), SolverKind::kTsvd);
  EXPECT_EQ(solver_name(SolverKind::kTikhonov), "tikhonov");
  EXPECT_THROW(parse_solver("qr"), Error);
  SolverOptions bad;
  bad.lambda = -1.0;
  EXPECT_THROW(bad.validate(), Error);
}

}  // namespace
}  // namespace randonet::model
