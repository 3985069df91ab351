#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "sagenet/ops.hpp"

using namespace sagenet;
using namespace sagenet::nn;
using fixtures::normal;

TEST(Linear, IdentityPassesThrough) {
  Rng rng(1);
  auto x = normal(3, 4, rng);
  ParamTensor w(4, 4), b(1, 4);
  for (std::size_t i = 0; i < 4; ++i) w.value(i, i) = 1.0;
  EXPECT_EQ(linear(x, w, b), x);
}

TEST(Linear, HandExample) {
  ParamTensor w(Tensor2::from_rows({{1, 0}, {0, 1}, {1, 1}}));
  EXPECT_EQ(linear(Tensor2::from_rows({{1, 2}}), w), Tensor2::from_rows({{1, 2, 3}}));
}

TEST(Linear, ShapeMismatchRaises) {
  ParamTensor w(3, 2);
  EXPECT_THROW(linear(Tensor2(1, 3), w), Error);
  ParamTensor b(1, 2);
  EXPECT_THROW(linear(Tensor2(1, 2), w, b), Error);
}

TEST(Linear, GradientsMatchFiniteDifferences) {
  Rng rng(2);
  auto x = normal(4, 7, rng);
  ParamTensor w(normal(5, 7, rng)), b(normal(1, 5, rng));
  auto up = normal(4, 5, rng);
  auto f = [&] { return gradcheck::project(linear(x, w, b), up); };
  w.zero_grad();
  b.zero_grad();
  auto dx = linear_backward(x, up, w, &b);
  EXPECT_LT(gradcheck::max_rel_error(dx, gradcheck::numeric(x, f)), 1e-6);
  EXPECT_LT(gradcheck::max_rel_error(w.grad, gradcheck::numeric(w.value, f)), 1e-6);
  EXPECT_LT(gradcheck::max_rel_error(b.grad, gradcheck::numeric(b.value, f)), 1e-6);
}

TEST(Linear, BackwardAccumulates) {
  Rng rng(3);
  auto x = normal(2, 3, rng);
  ParamTensor w(normal(2, 3, rng));
  auto g = normal(2, 2, rng);
  linear_backward_params(x, g, w);
  auto once = w.grad;
  linear_backward_params(x, g, w);
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_DOUBLE_EQ(w.grad.data()[i], 2 * once.data()[i]);
}

TEST(MeanAggregate, OneNeighborCopiesRow) {
  auto feats = Tensor2::from_rows({{1, 2}, {3, 4}});
  const std::uint64_t offsets[] = {0, 1};
  const std::uint32_t rows[] = {1};
  EXPECT_EQ(mean_aggregate(feats, offsets, rows), Tensor2::from_rows({{3, 4}}));
}

TEST(MeanAggregate, NoNeighborsGivesZeroRow) {
  auto feats = Tensor2::from_rows({{1, 2}, {3, 4}});
  const std::uint64_t offsets[] = {0, 2, 2};
  const std::uint32_t rows[] = {0, 1};
  EXPECT_EQ(mean_aggregate(feats, offsets, rows), Tensor2::from_rows({{2, 3}, {0, 0}}));
}

TEST(MeanAggregate, GradientsMatchFiniteDifferences) {
  Rng rng(4);
  auto feats = normal(6, 3, rng);
  const std::uint64_t offsets[] = {0, 3, 3, 5, 6};
  const std::uint32_t rows[] = {0, 2, 5, 1, 2, 4};
  auto up = normal(4, 3, rng);
  auto f = [&] { return gradcheck::project(mean_aggregate(feats, offsets, rows), up); };
  auto analytic = mean_aggregate_backward(up, offsets, rows, feats.rows());
  EXPECT_LT(gradcheck::max_rel_error(analytic, gradcheck::numeric(feats, f)), 1e-6);
}

TEST(Relu, Values) {
  EXPECT_EQ(relu(Tensor2::from_rows({{-1, 2}})), Tensor2::from_rows({{0, 2}}));
  EXPECT_EQ(relu_backward(Tensor2::from_rows({{-1, 2}}), Tensor2::from_rows({{5, 7}})), Tensor2::from_rows({{0, 7}}));
}

TEST(Relu, GradientMatchesFiniteDifferencesAwayFromZero) {
  Rng rng(5);
  auto x = normal(5, 4, rng);
  for (double& v : x.data())
    if (std::abs(v) < 1e-3) v = 0.5;
  auto up = normal(5, 4, rng);
  auto f = [&] { return gradcheck::project(relu(x), up); };
  EXPECT_LT(gradcheck::max_rel_error(relu_backward(x, up), gradcheck::numeric(x, f)), 1e-6);
}

TEST(Concat, ColumnOrderAndBackward) {
  auto a = Tensor2::from_rows({{1, 2}, {3, 4}});
  auto b = Tensor2::from_rows({{5, 6, 7}, {8, 9, 10}});
  auto c = concat(a, b);
  EXPECT_EQ(c, Tensor2::from_rows({{1, 2, 5, 6, 7}, {3, 4, 8, 9, 10}}));
  auto [ga, gb] = concat_backward(c, 2);
  EXPECT_EQ(ga, a);
  EXPECT_EQ(gb, b);
  EXPECT_THROW(concat(a, Tensor2(3, 1)), Error);
}

TEST(Concat, GradientMatchesFiniteDifferences) {
  Rng rng(6);
  auto a = normal(3, 2, rng), b = normal(3, 3, rng);
  auto up = normal(3, 5, rng);
  auto f = [&] { return gradcheck::project(concat(a, b), up); };
  auto [ga, gb] = concat_backward(up, 2);
  EXPECT_LT(gradcheck::max_rel_error(ga, gradcheck::numeric(a, f)), 1e-6);
  EXPECT_LT(gradcheck::max_rel_error(gb, gradcheck::numeric(b, f)), 1e-6);
}

TEST(L2Normalize, UnitRowsAndZeroRow) {
  auto y = l2_normalize_rows(Tensor2::from_rows({{3, 4}, {0, 0}}));
  EXPECT_DOUBLE_EQ(y(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(y(0, 1), 0.8);
  EXPECT_EQ(y(1, 0), 0.0);
}

TEST(L2Normalize, GradientMatchesFiniteDifferences) {
  Rng rng(7);
  auto x = normal(4, 5, rng);
  auto up = normal(4, 5, rng);
  auto f = [&] { return gradcheck::project(l2_normalize_rows(x), up); };
  EXPECT_LT(gradcheck::max_rel_error(l2_normalize_rows_backward(x, up), gradcheck::numeric(x, f)), 1e-6);
}

TEST(GatherScatter, AreAdjoint) {
  Rng rng(8);
  auto x = normal(5, 2, rng);
  const std::size_t rows[] = {4, 0, 4};
  auto g = gather_rows(x, rows);
  EXPECT_EQ(g.rows(), 3u);
  EXPECT_EQ(g(0, 1), x(4, 1));
  auto up = normal(3, 2, rng);
  auto f = [&] { return gradcheck::project(gather_rows(x, rows), up); };
  EXPECT_LT(gradcheck::max_rel_error(scatter_rows(up, rows, 5), gradcheck::numeric(x, f)), 1e-6);
}

TEST(SoftmaxCrossEntropy, UniformLogits) {
  const int labels[] = {2};
  EXPECT_NEAR(softmax_cross_entropy(Tensor2(1, 4, 0.3), labels).loss, std::log(4.0), 1e-12);
}

TEST(SoftmaxCrossEntropy, ConfidentCorrect) {
  const int labels[] = {0};
  EXPECT_NEAR(softmax_cross_entropy(Tensor2::from_rows({{10, -10}}), labels).loss, 2.06e-9, 0.01e-9);
}

TEST(SoftmaxCrossEntropy, StableForHugeLogits) {
  const int labels[] = {1};
  auto r = softmax_cross_entropy(Tensor2::from_rows({{1000, -1000}}), labels);
  EXPECT_NEAR(r.loss, 2000.0, 1e-9);
  EXPECT_TRUE(r.grad.all_finite());
}

TEST(SoftmaxCrossEntropy, LabelOutOfRangeRaises) {
  const int labels[] = {3};
  EXPECT_THROW(softmax_cross_entropy(Tensor2(1, 3), labels), Error);
  const int negative[] = {-1};
  EXPECT_THROW(softmax_cross_entropy(Tensor2(1, 3), negative), Error);
}

TEST(SoftmaxCrossEntropy, GradientMatchesFiniteDifferences) {
  Rng rng(9);
  auto logits = normal(6, 4, rng, 2.0);
  const int labels[] = {0, 3, 1, 1, 2, 0};
  auto f = [&] { return softmax_cross_entropy(logits, labels).loss; };
  auto analytic = softmax_cross_entropy(logits, labels).grad;
  EXPECT_LT(gradcheck::max_rel_error(analytic, gradcheck::numeric(logits, f)), 1e-5);
}

TEST(Mae, Values) {
  const double same[] = {3.0, 4.0};
  EXPECT_EQ(mae_loss(Tensor2::from_rows({{3}, {4}}), same).loss, 0.0);
  EXPECT_EQ(mae_loss(Tensor2::from_rows({{3}, {4}}), same).grad, Tensor2(2, 1));
  const double target[] = {1910};
  EXPECT_DOUBLE_EQ(mae_loss(Tensor2::from_rows({{1900}}), target).loss, 10.0);
}

TEST(Mae, GradientMatchesFiniteDifferencesAwayFromKinks) {
  Rng rng(10);
  auto pred = normal(8, 1, rng);
  std::vector<double> target(8);
  for (std::size_t i = 0; i < 8; ++i) target[i] = pred(i, 0) + (i % 2 ? 0.5 : -0.7);
  auto f = [&] { return mae_loss(pred, target).loss; };
  EXPECT_LT(gradcheck::max_rel_error(mae_loss(pred, target).grad, gradcheck::numeric(pred, f)), 1e-5);
}

TEST(Bce, Values) {
  EXPECT_NEAR(bce_with_logits(Tensor2(2, 3, 0.0), Tensor2(2, 3, 1.0)).loss, std::log(2.0), 1e-12);
  EXPECT_NEAR(bce_with_logits(Tensor2(1, 1, 20.0), Tensor2(1, 1, 1.0)).loss, 2.06e-9, 0.01e-9);
  auto big = bce_with_logits(Tensor2::from_rows({{-800, 800}}), Tensor2::from_rows({{1, 0}}));
  EXPECT_NEAR(big.loss, 800.0, 1e-9);
}

TEST(Bce, GradientMatchesFiniteDifferences) {
  Rng rng(11);
  auto logits = normal(5, 3, rng, 2.0);
  Tensor2 targets(5, 3);
  for (std::size_t i = 0; i < targets.size(); ++i) targets.data()[i] = i % 3 == 0;
  auto f = [&] { return bce_with_logits(logits, targets).loss; };
  EXPECT_LT(gradcheck::max_rel_error(bce_with_logits(logits, targets).grad, gradcheck::numeric(logits, f)), 1e-5);
}

TEST(Relu, PropagatesNan) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto y = relu(Tensor2::from_rows({{nan, -1.0}}));
  EXPECT_TRUE(std::isnan(y(0, 0)));
  EXPECT_EQ(y(0, 1), 0.0);
}
