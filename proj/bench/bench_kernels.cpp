#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "pastetrace/analyzer.hpp"
#include "pastetrace/scenario.hpp"
#include "pastetrace/stego.hpp"
#include "pastetrace/utf8.hpp"

using namespace pastetrace;

namespace {

std::vector<std::uint8_t> watermarked_bits(std::size_t chars) {
    std::mt19937_64 rng(7);
    UuidGenerator ids(7);
    std::string text(chars, ' ');
    for (auto& c : text) c = static_cast<char>('a' + rng() % 26);
    stego::StegoRecord r{InstallId(ids.next()), ProjectId(ids.next()), {}};
    return stego::gap_bits(utf8::decode(stego::embed(text, r)));
}

void BM_extract_serial(benchmark::State& state) {
    const auto bits = watermarked_bits(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(stego::extract_bits_serial(bits));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_extract_parallel(benchmark::State& state) {
    const auto bits = watermarked_bits(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(stego::extract_bits(bits));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

const std::filesystem::path& cohort_dir() {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() / "pastetrace_bench_cohort";
        std::filesystem::remove_all(d);
        generate_scenario({ScenarioKind::Organic, 11, 12, 5}, d);
        return d / "submissions";
    }();
    return dir;
}

void BM_ingest_serial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(ingest_serial(cohort_dir()));
}

void BM_ingest_parallel(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(ingest(cohort_dir()));
}

}  // namespace

BENCHMARK(BM_extract_serial)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_extract_parallel)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_ingest_serial);
BENCHMARK(BM_ingest_parallel);

BENCHMARK_MAIN();
