#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tss/pipeline.h"

namespace tss {

struct CheckedRun {
  RunResult result;
  std::optional<std::string> preservation;  // first violation
  std::optional<std::string> progress;      // stuck or non-poised quiescence
};

// Runs `main` from a fresh configuration; with check_config every
// intermediate configuration is checked against the initial interface.
CheckedRun run_checked(const Program& p, const std::string& main, Scheduler sched, size_t steps,
                       bool check_config);

std::vector<Scheduler> all_schedulers(uint64_t seed = 7);

// Pretty-printed erasure of the elaborated program against the
// pretty-printed instrumented program; empty when they agree.
std::string round_trip_diff(const Program& p);

struct CorpusRow {
  std::string program;
  std::string check;
  bool pass = false;
  std::string detail;
};

std::vector<CorpusRow> run_corpus(const std::string& dir, const std::string& filter);

}  // namespace tss
