// acd: run scenarios, compare runs, analyse reasons, serve the mock model.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "acd/analysis/corpus.hpp"
#include "acd/analysis/embedding.hpp"
#include "acd/analysis/kmeans.hpp"
#include "acd/analysis/pca.hpp"
#include "acd/analysis/report.hpp"
#include "acd/config.hpp"
#include "acd/errors.hpp"
#include "acd/llm/mock_chat.hpp"
#include "acd/runner.hpp"

namespace {

using namespace acd;

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& red,
            const std::string& out, bool live_llm, bool verbose) {
  auto config = ScenarioConfig::load(config_path);
  if (seed) config.seed = *seed;
  if (!red.empty()) {
    auto v = parse_red_variant(red);
    if (!v) throw ConfigError("red", "unknown variant '" + red + "'");
    config.red_variant = *v;
  }
  if (!out.empty()) config.output_dir = out;

  RunOptions options;
  options.live_llm = live_llm;
  options.log = std::make_shared<EventLog>(verbose);
  const auto s = run_scenario(config, options);

  std::cout << "scenario " << s.name << ": " << s.episodes << " episode(s) x " << s.steps << " steps, red "
            << s.red_variant << "\n";
  for (const auto& e : s.per_episode) {
    std::cout << "  episode " << e.episode << ": reward " << e.reward << ", green failures " << e.green_failures
              << ", impacts " << e.impacts << "\n";
  }
  std::cout << "  reward mean " << s.reward_mean << ", std " << s.reward_std << "\n";
  std::cout << "  mean decision latency " << s.mean_decision_latency << " s\n";
  if (s.invalid_actions > 0) {
    std::cout << "  WARNING: " << s.invalid_actions << " invalid action(s) replaced by Sleep; see events.log\n";
  }
  std::cout << "  outputs in " << config.output_dir.string() << "\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<MetricsSummary> summaries;
  for (const auto& path : inputs) summaries.push_back(MetricsSummary::load(path));
  const auto comparison = compare_runs(summaries);
  for (const auto& w : comparison.warnings) std::cerr << "warning: " << w << "\n";
  write_comparison(comparison, out);
  std::cout << comparison.to_csv();
  return 0;
}

std::pair<int, int> parse_range(const std::string& text) {
  auto dots = text.find("..");
  if (dots == std::string::npos) throw ConfigError("k-range", "expected MIN..MAX");
  return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
}

int cmd_analyze(const std::string& log, const std::string& agent, const std::string& k_range,
                const std::string& embed_endpoint, const std::string& embed_model, std::size_t dim,
                const std::string& summarize_endpoint, const std::string& out, const std::string& cache_dir,
                bool raw_space, std::uint64_t seed) {
  using namespace acd::analysis;
  const auto corpus = load_reason_corpus(log, agent);
  std::cout << "corpus: " << corpus.records.size() << " reasons for " << agent << "\n";
  if (corpus.records.size() < 4) throw ConfigError("log", "need at least 4 reasons to cluster");

  std::unique_ptr<Embedder> embedder;
  if (embed_endpoint.empty()) {
    embedder = std::make_unique<MockEmbedder>(dim);
  } else {
    const char* key = std::getenv("ACD_LLM_API_KEY");
    embedder = std::make_unique<HttpEmbedder>(embed_endpoint, embed_model, dim, key ? key : "");
  }
  EmbeddingCache cache(cache_dir.empty() ? std::filesystem::path(out) / "embedding_cache" : std::filesystem::path(cache_dir));
  const Matrix x = embed_texts(corpus.texts(), *embedder, &cache);

  std::vector<std::string> warnings;
  const int comps = static_cast<int>(std::min<Eigen::Index>({3, x.rows(), x.cols()}));
  const auto p = pca(x, comps);
  if (p.zero_variance) warnings.push_back("embeddings have zero variance; projection is all zeros");
  const Matrix& space = raw_space ? x : p.projected;

  auto [k_min, k_max] = parse_range(k_range);
  k_max = std::min(k_max, static_cast<int>(space.rows()) - 1);
  k_min = std::min(k_min, k_max);
  const auto sel = select_k(space, k_min, k_max, seed);
  const auto model = kmeans(space, sel.k, derive_seed(seed, static_cast<std::uint64_t>(sel.k)));

  std::optional<Summarizer> summarizer;
  if (!summarize_endpoint.empty()) {
    auto client = std::make_shared<llm::HttpChatClient>(summarize_endpoint,
                                                        std::getenv("ACD_LLM_API_KEY") ? std::getenv("ACD_LLM_API_KEY") : "");
    summarizer = [client](const std::string& prompt) {
      llm::ChatRequest req;
      req.model = "gpt-4o";
      req.messages = {{"user", prompt}};
      return client->complete(req, std::chrono::milliseconds(60000));
    };
  }
  const auto clusters = cluster_report(model, corpus, space, summarizer);
  std::vector<double> ratio(p.explained_ratio.data(), p.explained_ratio.data() + p.explained_ratio.size());
  write_report(out, clusters, corpus, model, p.projected, sel, ratio, warnings);

  std::cout << "selected K=" << sel.k << " (elbow " << sel.elbow_k << ")\n";
  for (const auto& c : clusters) {
    std::cout << "  cluster " << c.cluster << ": " << c.size << " reasons";
    if (!c.top_verbs.empty()) std::cout << ", mostly " << c.top_verbs.front().first;
    std::cout << "\n";
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int cmd_mock_llm(const std::string& host, int port, const std::string& script_path) {
  llm::MockScript script;
  if (!script_path.empty()) {
    std::ifstream in(script_path);
    if (!in) throw ConfigError("script", "cannot open " + script_path);
    script = llm::MockScript::from_json(nlohmann::json::parse(in));
  }
  llm::MockChatServer server(script);
  std::cout << "mock chat endpoint on http://" << host << ":" << port << "/v1/chat/completions" << std::endl;
  server.serve_forever(host, port);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent cyber-defense arena"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario");
  std::string config_path, red, run_out;
  std::optional<std::uint64_t> seed;
  bool live_llm = false, verbose = false;
  run->add_option("--config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--red", red, "Red variant: default, aggressive, stealthy, impact, degrade");
  run->add_option("--out", run_out, "Output directory");
  run->add_flag("--live-llm", live_llm, "Send llm-bound agents to the configured HTTP endpoint");
  run->add_flag("-v,--verbose", verbose, "Echo warnings to stderr");

  auto* cmp = app.add_subcommand("compare", "Compare summary.json files");
  std::vector<std::string> inputs;
  std::string cmp_out;
  cmp->add_option("--inputs", inputs, "summary.json files; the first is the latency baseline")->required();
  cmp->add_option("--out", cmp_out, "Output directory")->required();

  auto* an = app.add_subcommand("analyze", "Cluster an agent's action reasons");
  std::string log, agent, k_range = "2..10", embed_endpoint, embed_model = "text-embedding-3-large", summarize_endpoint,
                           an_out, cache_dir;
  std::size_t dim = 3072;
  bool mock_embed = false, raw_space = false;
  std::uint64_t an_seed = 0;
  an->add_option("--log", log, "trajectory.jsonl")->required()->check(CLI::ExistingFile);
  an->add_option("--agent", agent, "Agent name, e.g. blue_agent_0")->required();
  an->add_option("--k-range", k_range, "Candidate K values, MIN..MAX");
  auto* ep = an->add_option("--embed-endpoint", embed_endpoint, "Embeddings endpoint URL");
  an->add_flag("--mock-embed", mock_embed, "Use the deterministic hashing embedder")->excludes(ep);
  an->add_option("--embed-model", embed_model, "Embedding model name");
  an->add_option("--dim", dim, "Embedding width");
  an->add_option("--summarize-endpoint", summarize_endpoint, "Chat endpoint for one-sentence cluster summaries");
  an->add_option("--cache", cache_dir, "Embedding cache directory (default OUT/embedding_cache)");
  an->add_flag("--raw-space", raw_space, "Cluster raw embeddings instead of the 3-D projection");
  an->add_option("--seed", an_seed, "Clustering seed");
  an->add_option("--out", an_out, "Output directory")->required();

  auto* mock = app.add_subcommand("mock-llm", "Serve the deterministic mock chat model over HTTP");
  std::string host = "127.0.0.1", script;
  int port = 8080;
  mock->add_option("--host", host);
  mock->add_option("--port", port);
  mock->add_option("--script", script, "Mock script JSON (replies and faults)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    if (*run) return cmd_run(config_path, seed, red, run_out, live_llm, verbose);
    if (*cmp) return cmd_compare(inputs, cmp_out);
    if (*an) {
      if (!mock_embed && embed_endpoint.empty()) mock_embed = true;
      return cmd_analyze(log, agent, k_range, embed_endpoint, embed_model, dim, summarize_endpoint, an_out, cache_dir,
                         raw_space, an_seed);
    }
    if (*mock) return cmd_mock_llm(host, port, script);
  } catch (const acd::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const acd::ContractViolation& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
