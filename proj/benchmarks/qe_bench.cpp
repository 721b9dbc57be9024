#include <benchmark/benchmark.h>

#include "oag/coding.hpp"
#include "oag/oracle.hpp"
#include "oag/typegen.hpp"

using namespace oag;

namespace {

const char* kGroups[] = {"Z", "Z*Z", "Z*Z*Z", "Z*Q", "Q*Q"};

void BM_EliminateCorpus(benchmark::State& st) {
    auto g = GroupSpec::parse(kGroups[st.range(0)]);
    auto corpus = fuzz_corpus(g, 1, 50, FuzzLimits{}, g.all_discrete() ? Template::Bounded : Template::Mixed);
    for (auto _ : st)
        for (const auto& f : corpus) {
            auto r = eliminate(g, f);
            benchmark::DoNotOptimize(r);
        }
    st.counters["formulas/s"] = benchmark::Counter(static_cast<double>(corpus.size()), benchmark::Counter::kIsIterationInvariantRate);
    st.SetLabel(kGroups[st.range(0)]);
}
BENCHMARK(BM_EliminateCorpus)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_CodeSet(benchmark::State& st) {
    auto g = GroupSpec::parse(kGroups[st.range(0)]);
    auto corpus = fuzz_corpus(g, 2, 30, FuzzLimits{}, Template::Mixed);
    std::vector<FormulaPtr> unary;
    for (const auto& f : corpus)
        if (free_vars(f).size() == 1) unary.push_back(f);
    for (auto _ : st)
        for (const auto& f : unary) benchmark::DoNotOptimize(code_set(g, f));
    st.SetLabel(kGroups[st.range(0)]);
}
BENCHMARK(BM_CodeSet)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_GenericType(benchmark::State& st) {
    auto g = GroupSpec::parse("Z*Z");
    auto phi = parse(g, "(and (<= (c 1 1) (* 2 x)) (congr 3 x (c 0 1)))");
    for (auto _ : st) benchmark::DoNotOptimize(generic_type(g, phi, static_cast<Int>(st.range(0))));
}
BENCHMARK(BM_GenericType)->Arg(4)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
