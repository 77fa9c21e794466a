#include "acd/analysis/embedding.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <thread>

#include <json.hpp>
#include <openssl/evp.h>

#include "acd/errors.hpp"
#include "acd/hashing.hpp"
#include "acd/http.hpp"
#include "acd/rng.hpp"

namespace acd::analysis {

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '_') {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

}  // namespace

Matrix MockEmbedder::embed_batch(const std::vector<std::string>& texts) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(dim_));
  for (std::size_t r = 0; r < texts.size(); ++r) {
    const auto tokens = tokenize(texts[r]);
    auto add = [&](const std::string& feature, double weight) {
      Fnv1a h;
      h.add(feature);
      const auto v = derive_seed(h.value(), seed_);
      const auto col = static_cast<Eigen::Index>(v % dim_);
      out(static_cast<Eigen::Index>(r), col) += ((v >> 63) ? -weight : weight);
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      add(tokens[i], 1.0);
      if (i + 1 < tokens.size()) add(tokens[i] + ' ' + tokens[i + 1], 0.5);
    }
    const double norm = out.row(static_cast<Eigen::Index>(r)).norm();
    if (norm > 0.0) out.row(static_cast<Eigen::Index>(r)) /= norm;
  }
  return out;
}

HttpEmbedder::HttpEmbedder(std::string endpoint, std::string model, std::size_t dimension, std::string api_key,
                           std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), dim_(dimension), api_key_(std::move(api_key)),
      timeout_(timeout) {}

Matrix HttpEmbedder::embed_batch(const std::vector<std::string>& texts) {
  nlohmann::json body{{"model", model_}, {"input", texts}};
  HttpHeaders headers;
  if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);
  const auto res = http_post_json(endpoint_, body.dump(), headers, timeout_);
  if (res.status < 200 || res.status >= 300) throw TransportError("embedding endpoint returned HTTP " + std::to_string(res.status));
  auto j = nlohmann::json::parse(res.body, nullptr, false);
  if (!j.is_object() || !j.contains("data") || !j["data"].is_array() || j["data"].size() != texts.size()) {
    throw TransportError("embedding endpoint returned an unexpected body");
  }
  Matrix out(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto& item = j["data"][i];
    const auto idx = item.value("index", i);
    const auto& emb = item.at("embedding");
    if (idx >= texts.size() || !emb.is_array() || emb.size() != dim_) {
      throw TransportError("embedding of unexpected width (configured " + std::to_string(dim_) + ")");
    }
    for (std::size_t c = 0; c < dim_; ++c) out(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(c)) = emb[c].get<double>();
  }
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

EmbeddingCache::EmbeddingCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path EmbeddingCache::path_for(const std::string& model, const std::string& text) const {
  return dir_ / (sha256_hex(model + '\n' + text) + ".bin");
}

std::optional<Vector> EmbeddingCache::get(const std::string& model, const std::string& text) const {
  std::shared_lock lock(mu_);
  std::ifstream in(path_for(model, text), std::ios::binary);
  if (!in) return std::nullopt;
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || n == 0 || n > (1u << 24)) return std::nullopt;
  Vector v(static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) return std::nullopt;
  return v;
}

void EmbeddingCache::put(const std::string& model, const std::string& text, const Vector& v) {
  std::unique_lock lock(mu_);
  const auto path = path_for(model, text);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    const std::uint64_t n = static_cast<std::uint64_t>(v.size());
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  }
  std::filesystem::rename(tmp, path);
}

Matrix embed_texts(const std::vector<std::string>& texts, Embedder& embedder, EmbeddingCache* cache,
                   const EmbedOptions& options) {
  const auto dim = static_cast<Eigen::Index>(embedder.dimension());
  Matrix out(static_cast<Eigen::Index>(texts.size()), dim);
  std::map<std::string, Vector> known;
  std::vector<std::string> missing;
  for (const auto& t : texts) {
    if (known.contains(t)) continue;
    if (cache) {
      if (auto v = cache->get(embedder.model_id(), t); v && v->size() == dim) {
        known[t] = *v;
        continue;
      }
    }
    known[t] = Vector();
    missing.push_back(t);
  }

  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  for (std::size_t start = 0; start < missing.size(); start += batch) {
    std::vector<std::string> chunk(missing.begin() + static_cast<std::ptrdiff_t>(start),
                                   missing.begin() + static_cast<std::ptrdiff_t>(std::min(missing.size(), start + batch)));
    Matrix rows;
    auto wait = options.backoff;
    for (int attempt = 0;; ++attempt) {
      try {
        rows = embedder.embed_batch(chunk);
        break;
      } catch (const TransportError&) {
        if (attempt >= options.max_retries) throw;
        std::this_thread::sleep_for(wait);
        wait *= 2;
      }
    }
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      Vector v = rows.row(static_cast<Eigen::Index>(i)).transpose();
      if (!v.allFinite()) throw FormatError("embedding contains non-finite values");
      if (cache) cache->put(embedder.model_id(), chunk[i], v);
      known[chunk[i]] = std::move(v);
    }
  }

  for (std::size_t r = 0; r < texts.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = known.at(texts[r]).transpose();
  return out;
}

}  // namespace acd::analysis
