#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tss/checker.h"

namespace tss {

struct SemObj {
  enum class Kind { Proc, Msg };
  Kind kind = Kind::Proc;
  std::string chan;  // provided channel
  uint64_t time = 0;
  ProcP body;
};

struct Configuration {
  std::vector<SemObj> objects;
  // Absolute (time-0) type of every channel, fixed when the channel is created.
  std::map<std::string, TypeP> ghost;
  // Creation rank of every channel; schedulers order objects by it.
  std::unordered_map<std::string, uint64_t> rank;
  uint64_t next_chan = 0;
  std::string root;
};

struct UnknownProcess : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonEmptyContext : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StuckNotPoised : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Configuration init_config(const TypeEnv& env, const std::string& main);

enum class SchedKind { RoundRobin, SeededRandom, TimeSynchronous };

class Scheduler {
 public:
  static Scheduler round_robin() { return Scheduler(SchedKind::RoundRobin, 0); }
  static Scheduler seeded(uint64_t seed) { return Scheduler(SchedKind::SeededRandom, seed); }
  static Scheduler time_synchronous() { return Scheduler(SchedKind::TimeSynchronous, 0); }

  SchedKind kind() const { return kind_; }
  uint64_t seed() const { return seed_; }

 private:
  Scheduler(SchedKind k, uint64_t s) : kind_(k), seed_(s), rng_(s) {}
  SchedKind kind_;
  uint64_t seed_;
  std::mt19937_64 rng_;
  uint64_t last_rank_ = UINT64_MAX;
  friend struct SchedulerAccess;
};

// "rr", "sync", "random" or "random:SEED".
Scheduler parse_scheduler(const std::string& s);
std::string to_string(const Scheduler& s);

struct ObjView {
  SemObj::Kind kind;
  std::string chan;
  uint64_t time;
  std::string text;
  ProcP body;
};

struct StepRecord {
  std::string rule;
  uint64_t time = 0;
  std::vector<ObjView> consumed, produced;
};

std::string describe(const SemObj& o);
std::string to_line(const StepRecord& r);

// Fires one enabled rule; nullopt when no rule is enabled and the
// configuration is poised. Throws StuckNotPoised otherwise.
std::optional<StepRecord> step(const TypeEnv& env, Configuration& c, Scheduler& s);

enum class RunStatus { Quiescent, BudgetExhausted };

struct RunResult {
  Configuration final;
  std::vector<StepRecord> trace;
  RunStatus status = RunStatus::Quiescent;
  size_t steps = 0;
};

// Called after every step; returning false aborts the run.
using StepHook = std::function<bool(const Configuration&, const StepRecord&)>;

RunResult run(const TypeEnv& env, Configuration c, Scheduler& s, size_t budget,
              const StepHook& hook = {});

bool is_poised(const SemObj& o);
bool is_poised(const Configuration& c);

// A message on the chain starting at the root channel.
struct Observation {
  std::string chan;
  uint64_t time;
  std::string what;  // label, "close", "send" or "now"
};
std::vector<Observation> root_observations(const Configuration& c);

std::string trace_json(const std::vector<StepRecord>& trace);

struct ConfigTypeError : std::runtime_error {
  std::string chan;
  ConfigTypeError(std::string c, const std::string& msg)
      : std::runtime_error(msg), chan(std::move(c)) {}
};

// Omega' |= C :: Omega using the ghost types recorded in `c`.
class ConfigChecker {
 public:
  explicit ConfigChecker(const TypeEnv& env) : env_(env) {}
  // Checks all of c and remembers it as the configuration last seen.
  std::optional<ConfigTypeError> check(const Context& provides_in, const Configuration& c,
                                       const Context& provides_out);
  // Checks the configuration `c` that `rec` produced from the one last seen,
  // revisiting only the objects the step consumed or produced.
  std::optional<ConfigTypeError> advance(const Configuration& c, const StepRecord& rec);

 private:
  void prime(const Context& provides_in, const Configuration& c, const Context& provides_out);
  std::vector<std::string> uses(const SemObj& o);
  std::optional<ConfigTypeError> cycle_through(const std::string& chan);
  bool object_ok(const SemObj& o, const Configuration& c, std::string* why);
  const std::vector<std::string>& channels(const ProcP& body);
  const TypeEnv& env_;
  struct Entry {
    ProcP body;  // keeps the pointer alive so keys stay unique
    bool ok;
  };
  struct Key {
    const Proc* body;
    std::string chan;
    uint64_t time;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      return std::hash<const void*>()(k.body) ^ (std::hash<std::string>()(k.chan) * 31) ^
             (k.time * 0x9e3779b97f4a7c15ULL);
    }
  };
  std::unordered_map<Key, Entry, KeyHash> cache_;
  std::unordered_map<const Proc*, std::pair<ProcP, std::vector<std::string>>> free_;
  // State of the configuration last seen.
  std::set<std::string> in_;
  Context out_;
  std::unordered_map<std::string, SemObj> objs_;
  std::unordered_map<std::string, std::string> user_;  // used channel -> its client
  std::set<std::string> dangling_;                     // used, not provided
  std::set<std::string> orphan_;                       // provided, not used or offered
};

std::optional<ConfigTypeError> check_configuration(const TypeEnv& env, const Context& provides_in,
                                                   const Configuration& c,
                                                   const Context& provides_out);

}  // namespace tss
