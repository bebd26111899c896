#include <benchmark/benchmark.h>

#include "tss/corpus.h"
#include "tss/subtyping.h"

using namespace tss;

namespace {

const TypeEnv& basic_env() {
  static TypeEnv env(ground_all(parse_program("type S = &{ a : 1, b : 1 }")));
  return env;
}

void BM_SubtypeMatrixSerial(benchmark::State& st) {
  auto u = enumerate_universe(t_name("S"), static_cast<int>(st.range(0)), 3);
  for (auto _ : st) benchmark::DoNotOptimize(subtype_matrix_serial(basic_env(), u));
  st.counters["pairs"] = static_cast<double>(u.size() * u.size());
}

void BM_SubtypeMatrixOmp(benchmark::State& st) {
  auto u = enumerate_universe(t_name("S"), static_cast<int>(st.range(0)), 3);
  for (auto _ : st) benchmark::DoNotOptimize(subtype_matrix_omp(basic_env(), u));
  st.counters["pairs"] = static_cast<double>(u.size() * u.size());
}

const Program& append_program() {
  static Program p = [] {
    std::vector<std::string> inst;
    for (int r = 0; r <= 2; ++r)
      for (int n = 0; n <= 3; ++n)
        inst.push_back("main[" + std::to_string(r) + "," + std::to_string(n) + ",3]");
    return load_program(read_file(std::string(TSS_CORPUS_DIR) + "/list.tss"),
                        {CostModel::RS, false, inst});
  }();
  return p;
}

void BM_CheckSignatureSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(check_signature(*append_program().env));
}

void BM_CheckSignatureOmp(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(check_signature_omp(*append_program().env));
}

void BM_RunStream(benchmark::State& st) {
  static Program p = load_program(read_file(std::string(TSS_CORPUS_DIR) + "/stream.tss"),
                                  {CostModel::RS, false, {"main[1]"}});
  bool check = st.range(0) != 0;
  for (auto _ : st)
    benchmark::DoNotOptimize(run_checked(p, "main$1", Scheduler::round_robin(), 2000, check));
}

}  // namespace

BENCHMARK(BM_SubtypeMatrixSerial)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SubtypeMatrixOmp)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CheckSignatureSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CheckSignatureOmp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunStream)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
