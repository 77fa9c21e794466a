#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace acd::analysis {

struct ReasonRecord {
  int episode = 0;
  int step = 0;
  std::string verb;
  std::string reason;
};

struct ReasonCorpus {
  std::string source;
  std::vector<ReasonRecord> records;

  std::vector<std::string> texts() const;
};

/// Reads one agent's reasons from a trajectory log. Step 0 of each episode
/// (the initialization sample) and records with an empty reason are dropped;
/// so are busy-wait placeholders and invalid decisions. Throws FormatError on
/// an unreadable file or malformed line.
ReasonCorpus load_reason_corpus(const std::filesystem::path& trajectory, const std::string& agent);

}  // namespace acd::analysis
