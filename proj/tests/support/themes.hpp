#pragma once

// Synthetic reason corpus with a known number of themes. Each text draws words
// mostly from its own theme vocabulary, with a few shared filler words.

#include <random>
#include <string>
#include <vector>

namespace support {

struct ThemedCorpus {
  std::vector<std::string> texts;
  std::vector<int> theme;
};

inline ThemedCorpus themed_corpus(int n, std::uint64_t seed) {
  static const std::vector<std::vector<std::string>> vocab = {
      {"restore", "admin", "root", "reimage", "compromised", "rebuild", "privilege", "wipe", "credential", "reset"},
      {"block", "zone", "traffic", "firewall", "peer", "isolate", "boundary", "segment", "route", "lateral"},
      {"analyse", "scan", "suspicious", "inspect", "probe", "investigate", "evidence", "telemetry", "trace", "audit"},
      {"decoy", "honeypot", "lure", "deceive", "bait", "trap", "fake", "plant", "mislead", "tripwire"},
  };
  static const std::vector<std::string> filler = {"host", "the", "on", "after", "alert", "now"};
  std::mt19937_64 gen(seed);
  ThemedCorpus out;
  for (int i = 0; i < n; ++i) {
    const int t = i % static_cast<int>(vocab.size());
    std::uniform_int_distribution<std::size_t> pick(0, vocab[t].size() - 1), fill(0, filler.size() - 1);
    std::string text;
    for (int w = 0; w < 8; ++w) {
      if (!text.empty()) text += ' ';
      text += (w % 4 == 3) ? filler[fill(gen)] : vocab[t][pick(gen)];
    }
    out.texts.push_back(text + " " + std::to_string(i % 7));
    out.theme.push_back(t);
  }
  return out;
}

}  // namespace support
