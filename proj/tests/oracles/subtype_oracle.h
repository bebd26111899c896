#pragma once

#include <map>
#include <string>
#include <utility>

#include "tss/types.h"

namespace oracle {

// A modal prefix over the basic type, one letter per layer:
// 'n' for one ○, 'b' for □, 'd' for ◇.
inline std::string word(const tss::TypeP& t) {
  std::string w;
  const tss::Type* p = t.get();
  while (p) {
    if (p->kind == tss::TK::Next) w.append(p->n, 'n');
    else if (p->kind == tss::TK::Box) w += 'b';
    else if (p->kind == tss::TK::Diamond) w += 'd';
    else break;
    p = p->a.get();
  }
  return w;
}

// Tries every rule at every goal; no eager steps, no ordering.
class Subtype {
 public:
  bool operator()(const std::string& a, const std::string& b) { return leq(a, b); }

 private:
  std::map<std::pair<std::string, std::string>, bool> memo_;

  static bool next_then(const std::string& w, char m) {
    size_t i = w.find_first_not_of('n');
    return i != std::string::npos && w[i] == m;
  }

  bool leq(const std::string& a, const std::string& b) {
    if (a == b) return true;
    auto key = std::make_pair(a, b);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::string a1 = a.empty() ? a : a.substr(1), b1 = b.empty() ? b : b.substr(1);
    char x = a.empty() ? 0 : a[0], y = b.empty() ? 0 : b[0];
    bool r = (x == 'n' && y == 'n' && leq(a1, b1)) ||
             (x == 'b' && y == 'n' && leq(a, b1)) ||
             (x == 'n' && y == 'd' && leq(a1, b)) ||
             (y == 'b' && next_then(a, 'b') && leq(a, b1)) ||
             (x == 'b' && leq(a1, b)) ||
             (y == 'd' && leq(a, b1)) ||
             (x == 'd' && next_then(b, 'd') && leq(a1, b));
    memo_[key] = r;
    return r;
  }
};

}  // namespace oracle
