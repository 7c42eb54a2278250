// Micro-benchmark for the block evolution kernels (developer tool).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "cyclemix/chain.hpp"
#include "cyclemix/graph.hpp"
#include "cyclemix/kernels.hpp"

using namespace cyclemix;

int main(int argc, char** argv) {
    uint32_t n = argc > 1 ? static_cast<uint32_t>(std::atoi(argv[1])) : 4096;
    size_t width = argc > 2 ? static_cast<size_t>(std::atoi(argv[2])) : 64;
    int steps = argc > 3 ? std::atoi(argv[3]) : 2000;
    std::string backend_name = argc > 4 ? argv[4] : "auto";

    LongRangeGraph g = generate_m2(n, 1.5, 42);
    ChainParams params;
    params.q_c = 0.2;
    params.q_l = 0.1;
    params.r = 0.15;
    params.d = degree_cap(1.5);
    TransitionMatrix P = build_homogeneous(g, params);
    kernels::Plan plan = kernels::Plan::from_matrix(P);
    const kernels::Backend& backend = kernels::select_backend(backend_name);

    kernels::AlignedVec a(static_cast<size_t>(n) * width, 0.0), b(a.size());
    for (size_t l = 0; l < width; ++l) a[l * width + l] = 1.0;
    double* cur = a.data();
    double* nxt = b.data();

    auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < steps; ++k) {
        backend.step(plan, cur, nxt, width, width);
        std::swap(cur, nxt);
    }
    auto t1 = std::chrono::steady_clock::now();
    double sec = std::chrono::duration<double>(t1 - t0).count();
    double fma = static_cast<double>(steps) * plan.src.size() * width;
    printf("backend=%s n=%u width=%zu steps=%d time=%.3fs GFMA/s=%.2f checksum=%.17g\n",
           backend.name, n, width, steps, sec, fma / sec / 1e9,
           cur[width / 2]);
    return 0;
}
