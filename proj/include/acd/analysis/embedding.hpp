#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace acd::analysis {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Embedder {
 public:
  virtual ~Embedder() = default;
  /// Identifies the model; part of the cache key.
  virtual std::string model_id() const = 0;
  virtual std::size_t dimension() const = 0;
  /// One row per text. Throws TransportError on failure.
  virtual Matrix embed_batch(const std::vector<std::string>& texts) = 0;
};

/// Deterministic feature-hashing embedder: lower-cased word unigrams and
/// bigrams are hashed into `dimension` signed buckets, then rows are
/// L2-normalised. Texts sharing vocabulary land close together.
class MockEmbedder final : public Embedder {
 public:
  explicit MockEmbedder(std::size_t dimension = 3072, std::uint64_t seed = 0) : dim_(dimension), seed_(seed) {}
  std::string model_id() const override { return "mock-hash-" + std::to_string(dim_) + "-" + std::to_string(seed_); }
  std::size_t dimension() const override { return dim_; }
  Matrix embed_batch(const std::vector<std::string>& texts) override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

/// Embeddings endpoint speaking the common {"model", "input": [...]} ->
/// {"data": [{"embedding": [...]}]} format.
class HttpEmbedder final : public Embedder {
 public:
  HttpEmbedder(std::string endpoint, std::string model, std::size_t dimension, std::string api_key = {},
               std::chrono::milliseconds timeout = std::chrono::milliseconds(60000));
  std::string model_id() const override { return model_; }
  std::size_t dimension() const override { return dim_; }
  Matrix embed_batch(const std::vector<std::string>& texts) override;

 private:
  std::string endpoint_;
  std::string model_;
  std::size_t dim_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
};

std::string sha256_hex(const std::string& data);

/// One file per vector under `dir`, named by the SHA-256 of model id and text.
/// Many readers, one writer at a time.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::filesystem::path dir);
  std::optional<Vector> get(const std::string& model, const std::string& text) const;
  void put(const std::string& model, const std::string& text, const Vector& v);

 private:
  std::filesystem::path path_for(const std::string& model, const std::string& text) const;
  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;
};

struct EmbedOptions {
  std::size_t batch_size = 64;
  int max_retries = 2;
  std::chrono::milliseconds backoff{200};
};

/// Embeds every text, consulting and filling the cache. Identical texts are
/// requested once. A batch that still fails after retries rethrows; vectors
/// already cached stay on disk.
Matrix embed_texts(const std::vector<std::string>& texts, Embedder& embedder, EmbeddingCache* cache = nullptr,
                   const EmbedOptions& options = {});

}  // namespace acd::analysis
