#include <gtest/gtest.h>

#include <unistd.h>

#include <fstream>
#include <random>

#include <json.hpp>

#include "acd/analysis/corpus.hpp"
#include "acd/analysis/embedding.hpp"
#include "acd/analysis/kmeans.hpp"
#include "acd/analysis/pca.hpp"
#include "acd/analysis/report.hpp"
#include "acd/errors.hpp"
#include "oracles/jacobi.hpp"
#include "support/themes.hpp"

using namespace acd;
using namespace acd::analysis;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("acd_analysis_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Matrix random_matrix(int rows, int cols, std::mt19937_64& gen) {
  std::normal_distribution<double> d(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = d(gen) * (1.0 + j);
  return m;
}

oracle::Mat to_rows(const Matrix& m) {
  oracle::Mat out(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

/// `per` points around each centre with the given spread.
Matrix blobs(const std::vector<std::vector<double>>& centres, int per, double spread, std::uint64_t seed,
             std::vector<int>* truth = nullptr) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d(0.0, spread);
  const int dim = static_cast<int>(centres.front().size());
  Matrix m(static_cast<int>(centres.size()) * per, dim);
  int r = 0;
  for (std::size_t c = 0; c < centres.size(); ++c) {
    for (int i = 0; i < per; ++i, ++r) {
      for (int j = 0; j < dim; ++j) m(r, j) = centres[c][j] + d(gen);
      if (truth) truth->push_back(static_cast<int>(c));
    }
  }
  return m;
}

double silhouette_oracle(const Matrix& x, const std::vector<int>& labels) {
  const int n = static_cast<int>(x.rows());
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  if (k < 2) return 0.0;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> sum(k, 0.0);
    std::vector<int> count(k, 0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[labels[j]] += (x.row(i) - x.row(j)).norm();
      ++count[labels[j]];
    }
    const int own = labels[i];
    if (count[own] == 0) continue;
    const double a = sum[own] / count[own];
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c != own && count[c] > 0) b = std::min(b, sum[c] / count[c]);
    }
    total += (b - a) / std::max(a, b);
  }
  return total / n;
}

class CountingEmbedder final : public Embedder {
 public:
  std::string model_id() const override { return inner.model_id(); }
  std::size_t dimension() const override { return inner.dimension(); }
  Matrix embed_batch(const std::vector<std::string>& texts) override {
    requested += texts.size();
    return inner.embed_batch(texts);
  }
  MockEmbedder inner{64, 1};
  std::size_t requested = 0;
};

}  // namespace

TEST(Pca, MatchesJacobiOracle) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_matrix(10, 5, gen);
    const auto r = pca(x, 5);
    const auto ref = oracle::jacobi_eigen(oracle::covariance(to_rows(x)));
    for (int c = 0; c < 5; ++c) {
      EXPECT_NEAR(r.explained_variance(c), ref.values[c], 1e-9);
      double dot = 0.0;
      for (int j = 0; j < 5; ++j) dot += r.basis(j, c) * ref.vectors[c][j];
      EXPECT_NEAR(std::abs(dot), 1.0, 1e-6) << "trial " << trial << " component " << c;
    }
    EXPECT_NEAR(r.explained_ratio.sum(), 1.0, 1e-12);
  }
}

TEST(Pca, BasisIsOrthonormalAndSignFixed) {
  std::mt19937_64 gen(3);
  const auto x = random_matrix(30, 6, gen);
  const auto r = pca(x, 3);
  EXPECT_TRUE((r.basis.transpose() * r.basis).isApprox(Matrix::Identity(3, 3), 1e-12));
  for (int c = 0; c < 3; ++c) {
    Eigen::Index arg;
    r.basis.col(c).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(r.basis(arg, c), 0.0);
  }
  for (int c = 1; c < 3; ++c) EXPECT_LE(r.explained_variance(c), r.explained_variance(c - 1));
  const Matrix centred = x.rowwise() - x.colwise().mean();
  EXPECT_TRUE(r.projected.isApprox(centred * r.basis, 1e-12));
}

TEST(Pca, PlanarDataReconstructs) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> d(0.0, 1.0);
  Matrix x(40, 4);
  for (int i = 0; i < 40; ++i) {
    const double a = d(gen), b = d(gen);
    x.row(i) << a + 1.0, b - 2.0, a - b + 3.0, 2.0 * a;
  }
  const auto r = pca(x, 2);
  const Matrix back = (r.projected * r.basis.transpose()).rowwise() + r.mean.transpose();
  EXPECT_LT((back - x).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(r.explained_ratio.sum(), 1.0, 1e-9);
}

TEST(Pca, GramRouteAgreesWhenRowsAreFew) {
  std::mt19937_64 gen(21);
  const auto x = random_matrix(6, 40, gen);
  const auto r = pca(x, 3);
  const auto ref = oracle::jacobi_eigen(oracle::covariance(to_rows(x)), 200);
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(r.explained_variance(c), ref.values[c], 1e-8);
    double dot = 0.0;
    for (int j = 0; j < 40; ++j) dot += r.basis(j, c) * ref.vectors[c][j];
    EXPECT_NEAR(std::abs(dot), 1.0, 1e-6);
  }
}

TEST(Pca, ZeroVarianceAndBadComponents) {
  Matrix same = Matrix::Constant(5, 3, 2.5);
  const auto r = pca(same, 2);
  EXPECT_TRUE(r.zero_variance);
  EXPECT_EQ(r.projected.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(pca(same, 0), ParameterError);
  EXPECT_THROW(pca(same, 4), ParameterError);
}

TEST(KMeans, SeparatesBlobs) {
  std::vector<int> truth;
  const auto x = blobs({{0, 0}, {10, 0}, {0, 10}}, 20, 0.5, 4, &truth);
  const auto m = kmeans(x, 3, 1);
  EXPECT_EQ(m.k, 3);
  // Every true blob maps to exactly one cluster.
  for (int b = 0; b < 3; ++b) {
    std::set<int> labels;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (truth[i] == b) labels.insert(m.assignments[i]);
    }
    EXPECT_EQ(labels.size(), 1u);
  }
  for (std::size_t i = 1; i < m.inertia_history.size(); ++i) {
    EXPECT_LE(m.inertia_history[i], m.inertia_history[i - 1] + 1e-9);
  }
  EXPECT_NEAR(m.silhouette, silhouette_oracle(x, m.assignments), 1e-9);
  EXPECT_EQ(kmeans(x, 3, 1).assignments, m.assignments);
}

TEST(KMeans, EdgeCases) {
  const auto x = blobs({{0, 0}, {5, 5}}, 3, 0.1, 2);
  EXPECT_THROW(kmeans(x, 0, 1), ParameterError);
  EXPECT_THROW(kmeans(x, 7, 1), ParameterError);
  EXPECT_NEAR(kmeans(x, 6, 1).inertia, 0.0, 1e-12);
}

TEST(Silhouette, HandComputed) {
  Matrix x(4, 1);
  x << 0, 1, 10, 11;
  const std::vector<int> labels{0, 0, 1, 1};
  // a = 1 for every point; b = 10.5 for the outer points and 9.5 for the inner ones.
  const double expected = ((10.5 - 1) / 10.5 + (9.5 - 1) / 9.5) / 2;
  EXPECT_NEAR(silhouette(x, labels), expected, 1e-12);
  EXPECT_NEAR(silhouette_oracle(x, labels), expected, 1e-12);
  EXPECT_EQ(silhouette(x, {0, 0, 0, 0}), 0.0);
}

TEST(Silhouette, StaysInRangeOnRandomLabels) {
  std::mt19937_64 gen(6);
  std::uniform_int_distribution<int> lab(0, 3);
  for (int t = 0; t < 20; ++t) {
    const auto x = random_matrix(25, 3, gen);
    std::vector<int> labels(25);
    for (auto& l : labels) l = lab(gen);
    const double s = silhouette(x, labels);
    EXPECT_GE(s, -1.0);
    EXPECT_LE(s, 1.0);
    EXPECT_NEAR(s, silhouette_oracle(x, labels), 1e-9);
  }
}

TEST(SelectK, FindsBlobCount) {
  const auto two = blobs({{0, 0, 0}, {8, 8, 8}}, 15, 0.4, 9);
  EXPECT_EQ(select_k(two, 2, 6, 1).k, 2);
  const auto four = blobs({{0, 0}, {10, 0}, {0, 10}, {10, 10}}, 15, 0.5, 9);
  const auto r = select_k(four, 2, 8, 1);
  EXPECT_EQ(r.k, 4);
  EXPECT_EQ(r.ks, (std::vector<int>{2, 3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(r.silhouettes.size(), r.ks.size());
}

TEST(SelectK, IdenticalRowsAndBadRange) {
  const Matrix same = Matrix::Constant(8, 3, 1.0);
  const auto r = select_k(same, 2, 4, 1);
  EXPECT_EQ(r.k, 1);
  EXPECT_FALSE(r.warnings.empty());
  const auto x = blobs({{0, 0}, {5, 5}}, 3, 0.1, 2);
  EXPECT_THROW(select_k(x, 1, 3, 1), ParameterError);
  EXPECT_THROW(select_k(x, 4, 3, 1), ParameterError);
  EXPECT_THROW(select_k(x, 2, 6, 1), ParameterError);
}

TEST(Embedding, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Embedding, MockIsDeterministicAndUnitNorm) {
  MockEmbedder e(256, 3);
  const auto a = e.embed_batch({"restore the admin host", "block zone traffic"});
  const auto b = e.embed_batch({"restore the admin host", "block zone traffic"});
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.cols(), 256);
  for (int i = 0; i < a.rows(); ++i) EXPECT_NEAR(a.row(i).norm(), 1.0, 1e-12);
  const auto c = e.embed_batch({"restore the admin host now"});
  EXPECT_GT(a.row(0).dot(c.row(0)), a.row(1).dot(c.row(0)));
}

TEST(Embedding, CacheRoundTripAndHits) {
  const auto dir = scratch("cache");
  EmbeddingCache cache(dir);
  Vector v(3);
  v << 0.25, -1.0, 3.5;
  EXPECT_FALSE(cache.get("m", "t").has_value());
  cache.put("m", "t", v);
  ASSERT_TRUE(cache.get("m", "t").has_value());
  EXPECT_EQ(*cache.get("m", "t"), v);
  EXPECT_FALSE(cache.get("other", "t").has_value());

  CountingEmbedder e;
  const std::vector<std::string> texts{"alpha beta", "gamma", "alpha beta", "delta"};
  const auto first = embed_texts(texts, e, &cache);
  EXPECT_EQ(e.requested, 3u);
  EXPECT_EQ(first.row(0), first.row(2));
  const auto second = embed_texts(texts, e, &cache);
  EXPECT_EQ(e.requested, 3u);
  EXPECT_TRUE(second.isApprox(first, 1e-15));
}

TEST(Corpus, DropsPlaceholders) {
  const auto dir = scratch("corpus");
  const auto path = dir / "trajectory.jsonl";
  std::ofstream out(path);
  out << R"({"episode":0,"step":0,"agent":"blue_agent_0","verb":"Sleep","reason":"init"})" << "\n"
      << R"({"episode":0,"step":1,"agent":"blue_agent_0","verb":"Analyse","reason":"odd scan","valid":true})" << "\n"
      << R"({"episode":0,"step":2,"agent":"blue_agent_0","verb":"Sleep","reason":"bad","valid":false})" << "\n"
      << R"({"episode":0,"step":3,"agent":"blue_agent_0","verb":"Sleep","reason":"waiting","busy":true})" << "\n"
      << R"({"episode":0,"step":4,"agent":"blue_agent_0","verb":"Sleep","reason":"  "})" << "\n"
      << R"({"episode":0,"step":5,"agent":"blue_agent_1","verb":"Remove","reason":"other agent"})" << "\n"
      << R"({"episode":1,"step":7,"agent":"blue_agent_0","verb":"Restore","reason":"admin seen"})" << "\n";
  out.close();
  const auto c = load_reason_corpus(path, "blue_agent_0");
  ASSERT_EQ(c.records.size(), 2u);
  EXPECT_EQ(c.texts(), (std::vector<std::string>{"odd scan", "admin seen"}));
  EXPECT_EQ(c.records[1].episode, 1);

  std::ofstream(dir / "broken.jsonl") << "{not json\n";
  EXPECT_THROW(load_reason_corpus(dir / "broken.jsonl", "blue_agent_0"), FormatError);
  EXPECT_THROW(load_reason_corpus(dir / "missing.jsonl", "blue_agent_0"), FormatError);
}

TEST(Report, ThemedCorpusEndToEnd) {
  const auto themed = support::themed_corpus(80, 5);
  ReasonCorpus corpus;
  corpus.source = "synthetic";
  const std::vector<std::string> verbs{"Restore", "BlockTrafficZone", "Analyse", "DeployDecoy"};
  for (std::size_t i = 0; i < themed.texts.size(); ++i) {
    corpus.records.push_back({0, static_cast<int>(i) + 1, verbs[themed.theme[i]], themed.texts[i]});
  }
  MockEmbedder e(512, 0);
  const auto emb = embed_texts(corpus.texts(), e);
  const auto p = pca(emb, 3);
  const auto sel = select_k(p.projected, 2, 6, 1);
  EXPECT_EQ(sel.k, 4);
  const auto model = kmeans(p.projected, sel.k, 1);

  int calls = 0;
  Summarizer flaky = [&](const std::string& prompt) -> std::string {
    EXPECT_NE(prompt.find("- "), std::string::npos);
    if (++calls == 2) throw TransportError("down");
    return "a summary";
  };
  const auto clusters = cluster_report(model, corpus, p.projected, flaky);
  ASSERT_EQ(clusters.size(), 4u);
  int total = 0, empty = 0;
  for (const auto& c : clusters) {
    total += c.size;
    EXPECT_EQ(c.top_verbs.size(), 1u);
    EXPECT_LE(c.representatives.size(), 3u);
    if (c.summary.empty()) ++empty;
  }
  EXPECT_EQ(total, 80);
  EXPECT_EQ(empty, 1);

  const auto out = scratch("report");
  std::vector<double> ratio(p.explained_ratio.data(), p.explained_ratio.data() + p.explained_ratio.size());
  write_report(out, clusters, corpus, model, p.projected, sel, ratio, {});
  std::ifstream csv(out / "clusters.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "cluster,size,top_verbs,representative,summary");
  std::ifstream scatter(out / "scatter3d.csv");
  int rows = 0;
  for (std::string line; std::getline(scatter, line);) ++rows;
  EXPECT_EQ(rows, 81);
  const auto diag = nlohmann::json::parse(std::ifstream(out / "diagnostics.json"));
  EXPECT_EQ(diag.at("selected_k"), 4);
  EXPECT_EQ(diag.at("samples"), 80);
}
