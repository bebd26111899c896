#include "tss/subtyping.h"

namespace tss {

namespace {

// Layer codes: k > 0 is ○^k, -1 is □, -2 is ◇.
void extend(std::vector<int>& seq, int depth, int max_next,
            std::vector<std::vector<int>>& out) {
  out.push_back(seq);
  if (static_cast<int>(seq.size()) == depth) return;
  bool after_next = !seq.empty() && seq.back() > 0;
  std::vector<int> layers;
  if (!after_next)
    for (int k = 1; k <= max_next; ++k) layers.push_back(k);
  layers.push_back(-1);
  layers.push_back(-2);
  for (int l : layers) {
    seq.push_back(l);
    extend(seq, depth, max_next, out);
    seq.pop_back();
  }
}

}  // namespace

std::vector<TypeP> enumerate_universe(const TypeP& base, int depth, int max_next) {
  std::vector<std::vector<int>> seqs;
  std::vector<int> seq;
  extend(seq, depth, max_next, seqs);
  std::vector<TypeP> out;
  out.reserve(seqs.size());
  for (auto& s : seqs) {
    TypeP t = base;
    for (auto it = s.rbegin(); it != s.rend(); ++it)
      t = *it > 0 ? t_next(static_cast<uint64_t>(*it), t) : *it == -1 ? t_box(t) : t_dia(t);
    out.push_back(t);
  }
  return out;
}

std::vector<uint8_t> subtype_matrix_serial(const TypeEnv& env, const std::vector<TypeP>& ts) {
  const size_t n = ts.size();
  std::vector<uint8_t> m(n * n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) m[i * n + j] = is_subtype(env, ts[i], ts[j]);
  return m;
}

std::vector<uint8_t> subtype_matrix_omp(const TypeEnv& env, const std::vector<TypeP>& ts) {
  const long n = static_cast<long>(ts.size());
  std::vector<uint8_t> m(static_cast<size_t>(n * n));
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) m[i * n + j] = is_subtype(env, ts[i], ts[j]);
  return m;
}

}  // namespace tss
