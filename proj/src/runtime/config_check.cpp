#include <algorithm>
#include <set>

#include "tss/runtime.h"

namespace tss {

namespace {

// Local types at time t of the types A with A <: T (offer side).
std::vector<TypeP> offer_locals(const TypeEnv& env, const TypeP& t, uint64_t time) {
  std::vector<TypeP> as{t};
  auto [n, h] = strip_next(env, t);
  if (h->kind == TK::Box)
    for (uint64_t m = 0; m < n; ++m) as.push_back(t_next(m, h));
  if (h->kind == TK::Diamond)
    for (uint64_t m = n + 1; m <= std::max(n, time); ++m) as.push_back(t_next(m, h));
  std::vector<TypeP> out;
  std::set<std::string> seen;
  for (auto& a : as)
    if (auto s = shift_right_n(env, a, time))
      if (seen.insert(to_string(*s)).second) out.push_back(*s);
  return out;
}

// Local types at time t of the types B with T <: B (use side).
std::vector<TypeP> use_locals(const TypeEnv& env, const TypeP& t, uint64_t time) {
  std::vector<TypeP> bs{t};
  auto [n, h] = strip_next(env, t);
  if (h->kind == TK::Box)
    for (uint64_t m = n + 1; m <= std::max(n, time); ++m) bs.push_back(t_next(m, h));
  if (h->kind == TK::Diamond)
    for (uint64_t m = 0; m < n; ++m) bs.push_back(t_next(m, h));
  std::vector<TypeP> out;
  std::set<std::string> seen;
  for (auto& b : bs)
    if (auto s = shift_left_n(env, b, time))
      if (seen.insert(to_string(*s)).second) out.push_back(*s);
  return out;
}

constexpr size_t kMaxCombinations = 4096;

}  // namespace

const std::vector<std::string>& ConfigChecker::channels(const ProcP& body) {
  auto it = free_.find(body.get());
  if (it == free_.end()) it = free_.emplace(body.get(), std::pair{body, free_channels(body)}).first;
  return it->second.second;
}

bool ConfigChecker::object_ok(const SemObj& o, const Configuration& c, std::string* why) {
  Key key{o.body.get(), o.chan, o.time};
  if (auto it = cache_.find(key); it != cache_.end()) {
    if (!it->second.ok) *why = "ill-typed at its interface";
    return it->second.ok;
  }
  auto ghost = [&](const std::string& x) -> TypeP {
    auto it = c.ghost.find(x);
    return it == c.ghost.end() ? nullptr : it->second;
  };
  bool ok = false;
  TypeP own = ghost(o.chan);
  std::vector<std::string> used;
  for (auto& y : channels(o.body))
    if (y != o.chan) used.push_back(y);
  std::vector<std::vector<TypeP>> choices;
  if (own) choices.push_back(offer_locals(env_, own, o.time));
  for (auto& y : used) {
    if (TypeP g = ghost(y)) choices.push_back(use_locals(env_, g, o.time));
    else own = nullptr;
  }
  if (!own) {
    *why = "channel without a recorded type";
  } else {
    size_t total = 1;
    for (auto& ch : choices) total = std::min(kMaxCombinations, total * ch.size());
    std::vector<size_t> idx(choices.size(), 0);
    std::optional<TypeError> last;
    for (size_t k = 0; k < total && !ok; ++k) {
      Context ctx;
      for (size_t j = 0; j < used.size(); ++j) ctx.push_back({used[j], choices[j + 1][idx[j + 1]]});
      last = check_process(env_, ctx, o.body, {o.chan, choices[0][idx[0]]});
      ok = !last;
      for (size_t j = 0; j < idx.size(); ++j) {
        if (++idx[j] < choices[j].size()) break;
        idx[j] = 0;
      }
    }
    if (!ok) *why = last ? last->render() : "no local type is defined at this time";
  }
  cache_.emplace(key, Entry{o.body, ok});
  return ok;
}

std::optional<ConfigTypeError> ConfigChecker::check(const Context& provides_in,
                                                    const Configuration& c,
                                                    const Context& provides_out) {
  std::unordered_map<std::string, size_t> provider;
  for (size_t i = 0; i < c.objects.size(); ++i)
    if (!provider.emplace(c.objects[i].chan, i).second)
      return ConfigTypeError(c.objects[i].chan, "two objects provide channel " + c.objects[i].chan);
  std::set<std::string> in;
  for (auto& d : provides_in) in.insert(d.name);
  std::unordered_map<std::string, size_t> user;
  std::vector<std::vector<size_t>> clients(c.objects.size());
  std::vector<size_t> indegree(c.objects.size(), 0);
  for (size_t i = 0; i < c.objects.size(); ++i) {
    for (auto& y : channels(c.objects[i].body)) {
      if (y == c.objects[i].chan) continue;
      if (!user.emplace(y, i).second)
        return ConfigTypeError(y, "channel " + y + " has two clients");
      auto it = provider.find(y);
      if (it != provider.end()) {
        clients[it->second].push_back(i);
        ++indegree[i];
      } else if (!in.count(y)) {
        return ConfigTypeError(y, "channel " + y + " is used but not provided");
      }
    }
  }
  // Providers must be orderable to the left of their clients.
  std::vector<size_t> ready;
  for (size_t i = 0; i < indegree.size(); ++i)
    if (indegree[i] == 0) ready.push_back(i);
  size_t placed = 0;
  while (!ready.empty()) {
    size_t i = ready.back();
    ready.pop_back();
    ++placed;
    for (size_t j : clients[i])
      if (--indegree[j] == 0) ready.push_back(j);
  }
  if (placed != c.objects.size())
    return ConfigTypeError(c.root, "provider/client relation is cyclic");
  std::set<std::string> out;
  for (auto& d : provides_out) {
    out.insert(d.name);
    auto it = provider.find(d.name);
    if (it == provider.end() && !in.count(d.name))
      return ConfigTypeError(d.name, "interface channel " + d.name + " is not provided");
    if (user.count(d.name))
      return ConfigTypeError(d.name, "interface channel " + d.name + " has a client inside the configuration");
    auto g = c.ghost.find(d.name);
    if (g == c.ghost.end() || !type_equal(env_, g->second, d.type))
      return ConfigTypeError(d.name, "interface channel " + d.name + " changed its type");
  }
  for (auto& [x, i] : provider)
    if (!user.count(x) && !out.count(x))
      return ConfigTypeError(x, "channel " + x + " is provided but neither used nor offered");
  for (auto& o : c.objects) {
    std::string why;
    if (!object_ok(o, c, &why))
      return ConfigTypeError(o.chan, describe(o) + ": " + why);
  }
  prime(provides_in, c, provides_out);
  return std::nullopt;
}

std::vector<std::string> ConfigChecker::uses(const SemObj& o) {
  std::vector<std::string> u;
  for (auto& y : channels(o.body))
    if (y != o.chan) u.push_back(y);
  return u;
}

void ConfigChecker::prime(const Context& provides_in, const Configuration& c,
                          const Context& provides_out) {
  in_.clear();
  for (auto& d : provides_in) in_.insert(d.name);
  out_ = provides_out;
  objs_.clear();
  user_.clear();
  dangling_.clear();
  orphan_.clear();
  for (auto& o : c.objects) {
    objs_[o.chan] = o;
    for (auto& y : uses(o)) user_[y] = o.chan;
  }
}

std::optional<ConfigTypeError> ConfigChecker::cycle_through(const std::string& chan) {
  std::vector<std::string> todo{chan};
  std::set<std::string> seen;
  while (!todo.empty()) {
    std::string x = todo.back();
    todo.pop_back();
    auto it = objs_.find(x);
    if (it == objs_.end()) continue;
    for (auto& y : uses(it->second)) {
      if (y == chan) return ConfigTypeError(chan, "provider/client relation is cyclic");
      if (seen.insert(y).second) todo.push_back(y);
    }
  }
  return std::nullopt;
}

std::optional<ConfigTypeError> ConfigChecker::advance(const Configuration& c,
                                                      const StepRecord& rec) {
  auto offered = [&](const std::string& x) {
    return std::any_of(out_.begin(), out_.end(), [&](const ChanDecl& d) { return d.name == x; });
  };
  for (auto& v : rec.consumed) {
    auto it = objs_.find(v.chan);
    if (it == objs_.end()) return ConfigTypeError(v.chan, "consumed object " + v.chan + " was not present");
    for (auto& y : uses(it->second)) {
      if (auto u = user_.find(y); u != user_.end() && u->second == v.chan) user_.erase(u);
      dangling_.erase(y);
      if (objs_.count(y) && !offered(y)) orphan_.insert(y);
    }
    objs_.erase(it);
    orphan_.erase(v.chan);
    if (user_.count(v.chan) && !in_.count(v.chan)) dangling_.insert(v.chan);
  }
  for (auto& v : rec.produced) {
    SemObj o{v.kind, v.chan, v.time, v.body};
    if (!objs_.emplace(o.chan, o).second)
      return ConfigTypeError(o.chan, "two objects provide channel " + o.chan);
    dangling_.erase(o.chan);
    if (!user_.count(o.chan) && !offered(o.chan)) orphan_.insert(o.chan);
    for (auto& y : uses(o)) {
      if (!user_.emplace(y, o.chan).second)
        return ConfigTypeError(y, "channel " + y + " has two clients");
      orphan_.erase(y);
      if (!objs_.count(y) && !in_.count(y)) dangling_.insert(y);
    }
  }
  if (!dangling_.empty())
    return ConfigTypeError(*dangling_.begin(), "channel " + *dangling_.begin() + " is used but not provided");
  if (!orphan_.empty())
    return ConfigTypeError(*orphan_.begin(),
                           "channel " + *orphan_.begin() + " is provided but neither used nor offered");
  for (auto& d : out_) {
    if (!objs_.count(d.name) && !in_.count(d.name))
      return ConfigTypeError(d.name, "interface channel " + d.name + " is not provided");
    if (user_.count(d.name))
      return ConfigTypeError(d.name, "interface channel " + d.name + " has a client inside the configuration");
    auto g = c.ghost.find(d.name);
    if (g == c.ghost.end() || !type_equal(env_, g->second, d.type))
      return ConfigTypeError(d.name, "interface channel " + d.name + " changed its type");
  }
  for (auto& v : rec.produced)
    if (auto e = cycle_through(v.chan)) return e;
  for (auto& v : rec.produced) {
    const SemObj& o = objs_.at(v.chan);
    std::string why;
    if (!object_ok(o, c, &why)) return ConfigTypeError(o.chan, describe(o) + ": " + why);
  }
  return std::nullopt;
}

std::optional<ConfigTypeError> check_configuration(const TypeEnv& env, const Context& provides_in,
                                                   const Configuration& c,
                                                   const Context& provides_out) {
  ConfigChecker checker(env);
  return checker.check(provides_in, c, provides_out);
}

}  // namespace tss
