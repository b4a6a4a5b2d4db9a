// Times the serial and OpenMP batch runners on the same random programs and
// checks that they produce identical summaries.
//
//   bench_batch [--count N] [--level N] [--fuel N] [--threads N] [--seed N]

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cstdio>

#include "cpsh/check.hpp"
#include "cpsh/gen.hpp"

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel batch comparison"};
    std::size_t count = 400;
    int level = 2;
    std::uint64_t fuel = 100000;
    int threads = 0;
    std::uint64_t seed = 1;
    app.add_option("--count", count, "programs per batch");
    app.add_option("--level", level, "hierarchy level")->check(CLI::Range(1, 8));
    app.add_option("--fuel", fuel, "step budget per run");
    app.add_option("--threads", threads, "OpenMP threads (0: default)");
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    cpsh::gen::Rng rng(seed);
    cpsh::gen::ProgramOptions opts;
    opts.level = level;
    std::vector<cpsh::Term> programs;
    for (std::size_t i = 0; i < count; ++i) programs.push_back(cpsh::gen::program(rng, opts));

    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    auto serial = cpsh::check::run_batch_serial(programs, level, fuel);
    auto t1 = clock::now();
    auto parallel = cpsh::check::run_batch_parallel(programs, level, fuel, threads);
    auto t2 = clock::now();

    const double s = std::chrono::duration<double>(t1 - t0).count();
    const double p = std::chrono::duration<double>(t2 - t1).count();
    const bool same = serial == parallel;
    std::printf("programs=%zu level=%d fuel=%llu threads=%d\n", count, level, static_cast<unsigned long long>(fuel),
                threads > 0 ? threads : omp_get_max_threads());
    std::printf("serial   %.3fs\nparallel %.3fs\nspeedup  %.2fx\nresults  %s\n", s, p, p > 0 ? s / p : 0.0,
                same ? "identical" : "DIFFERENT");
    return same ? 0 : 1;
}
