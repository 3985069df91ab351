#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sagenet/retrieval.hpp"

using namespace sagenet;
using nn::Tensor2;

namespace {

EmbeddingStore random_store(std::size_t n, std::size_t dim, Rng& rng) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("id" + std::to_string(1000 + i));
  return EmbeddingStore(ids, fixtures::normal(n, dim, rng));
}

std::vector<std::vector<double>> rows_of(const Tensor2& m) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < m.rows(); ++i) out.emplace_back(m.row(i).begin(), m.row(i).end());
  return out;
}

}  // namespace

TEST(Knn, DuplicateRanksFirst) {
  auto m = Tensor2::from_rows({{1, 2}, {-1, 0}, {1, 2}, {2, 4.5}});
  EmbeddingStore s({"q", "b", "dup", "c"}, m);
  auto r = knn(s, "q", 3);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].id, "dup");
  EXPECT_NEAR(r[0].distance, 0.0, 1e-15);
  for (const auto& n : r) EXPECT_NE(n.id, "q");
}

TEST(Knn, OrthogonalIsOne) {
  auto a = std::vector<double>{1, 0}, b = std::vector<double>{0, 3};
  EXPECT_EQ(cosine_distance(a, b), 1.0);
}

TEST(Knn, TiesBreakById) {
  auto m = Tensor2::from_rows({{1, 0}, {0, 1}, {0, 2}, {0, 1}});
  EmbeddingStore s({"q", "z", "a", "m"}, m);
  auto r = knn(s, "q", 3);
  EXPECT_EQ(r[0].id, "a");
  EXPECT_EQ(r[1].id, "m");
  EXPECT_EQ(r[2].id, "z");
}

TEST(Knn, Errors) {
  auto m = Tensor2::from_rows({{0, 0}, {1, 0}, {0, 1}});
  EmbeddingStore s({"zero", "x", "y"}, m);
  try {
    knn(s, "zero", 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "degenerate embedding");
  }
  EXPECT_THROW(knn(s, "x", 3), Error);
  EXPECT_THROW(knn(s, "missing", 1), Error);
  auto r = knn(s, "x", 2);
  EXPECT_EQ(r[1].id, "zero");
  EXPECT_EQ(r[1].distance, 1.0);
  EXPECT_THROW(EmbeddingStore({"a", "a"}, Tensor2(2, 1)), Error);
}

TEST(Knn, MatchesExhaustiveSort) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_store(100, 16, rng);
    const std::size_t q = uniform_index(rng, 100);
    auto got = knn(s, s.ids()[q], 5);
    auto want = oracle::knn(s.ids(), rows_of(s.matrix()), q, 5);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].id, want[i].second);
      EXPECT_NEAR(got[i].distance, want[i].first, 1e-12);
    }
  }
}

TEST(Knn, ScaleInvariant) {
  Rng rng(6);
  auto s = random_store(50, 8, rng);
  Tensor2 scaled = s.matrix();
  for (std::size_t i = 0; i < scaled.rows(); ++i) {
    const double c = 0.01 + 100.0 * uniform_unit(rng);
    for (double& v : scaled.row(i)) v *= c;
  }
  EmbeddingStore t(s.ids(), scaled);
  auto a = knn(s, s.ids()[7], 10), b = knn(t, s.ids()[7], 10);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_NEAR(a[i].distance, b[i].distance, 1e-12);
  }
}

TEST(Store, RoundTrip) {
  Rng rng(7);
  auto s = random_store(12, 5, rng);
  auto path = std::filesystem::temp_directory_path() / "sagenet_store_test.sge";
  save_store(path, s);
  EXPECT_EQ(load_store(path), s);
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".ids.json");
}

TEST(Store, MatrixRejectsMutations) {
  Rng rng(8);
  auto m = fixtures::normal(3, 2, rng);
  std::stringstream ss;
  write_store_matrix(ss, m);
  const std::string bytes = ss.str();
  std::stringstream ok(bytes);
  EXPECT_EQ(read_store_matrix(ok), m);
  for (std::size_t i = 0; i < 4; ++i) {
    std::string bad = bytes;
    bad[i] ^= 0x20;
    std::stringstream in(bad);
    EXPECT_THROW(read_store_matrix(in), Error);
  }
  std::stringstream truncated(bytes.substr(0, bytes.size() - 1));
  EXPECT_THROW(read_store_matrix(truncated), Error);
}

namespace {

struct EmbedFixture {
  fixtures::EndToEnd e = fixtures::make_end_to_end(3, false);
  InferenceContext ctx() const {
    InferenceContext c;
    c.params = &e.params;
    c.graph = &e.graph;
    c.feats = &e.feats;
    c.visual = &e.visual;
    c.sampler.fanouts = {3, 2};
    c.artists = e.artists;
    c.seed = 99;
    c.batch_size = 3;
    return c;
  }
  std::vector<NodeId> all() const {
    std::vector<NodeId> v(e.manifest.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<NodeId>(i);
    return v;
  }
};

}  // namespace

TEST(EmbedAll, ZeroModelGivesZeroRows) {
  EmbedFixture f;
  for (auto* t : f.e.params.tensors()) t->value.fill(0.0);
  auto s = embed_all(f.ctx(), f.e.manifest, f.all());
  for (double v : s.matrix().data()) EXPECT_EQ(v, 0.0);
}

TEST(EmbedAll, DeterministicAndMatchesSingleNodeForward) {
  EmbedFixture f;
  auto a = embed_all(f.ctx(), f.e.manifest, f.all());
  auto ctx = f.ctx();
  ctx.threads = 3;
  ctx.batch_size = 2;
  EXPECT_EQ(embed_all(ctx, f.e.manifest, f.all()), a);
  for (NodeId v : {NodeId{0}, NodeId{4}, NodeId{7}}) {
    const NodeId one[] = {v};
    auto block = sample_neighborhood(f.e.graph, one, ctx.sampler, f.e.artists, ctx.seed);
    auto pass = forward(f.e.params, f.e.feats, &f.e.visual, block);
    auto row = a.matrix().row(v);
    EXPECT_TRUE(std::equal(row.begin(), row.end(), pass.embedding.row(0).begin()));
  }
}
