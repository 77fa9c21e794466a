#include "acd/analysis/corpus.hpp"

#include <fstream>

#include <json.hpp>

#include "acd/errors.hpp"

namespace acd::analysis {

std::vector<std::string> ReasonCorpus::texts() const {
  std::vector<std::string> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.reason);
  return out;
}

ReasonCorpus load_reason_corpus(const std::filesystem::path& trajectory, const std::string& agent) {
  std::ifstream in(trajectory);
  if (!in) throw FormatError("cannot open " + trajectory.string());
  ReasonCorpus corpus;
  corpus.source = trajectory.string();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (!j.is_object()) throw FormatError(trajectory.string() + ":" + std::to_string(lineno) + ": not a JSON object");
    if (j.value("agent", "") != agent) continue;
    const int step = j.value("step", 0);
    if (step == 0) continue;
    if (!j.value("valid", true) || j.value("busy", false)) continue;
    auto reason = j.value("reason", "");
    if (reason.find_first_not_of(" \t") == std::string::npos) continue;
    corpus.records.push_back({j.value("episode", 0), step, j.value("verb", ""), std::move(reason)});
  }
  return corpus;
}

}  // namespace acd::analysis
