#include "cyclemix/kernels.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "cyclemix/error.hpp"

namespace cyclemix::kernels {

Plan Plan::from_matrix(const TransitionMatrix& P) {
    uint32_t n = P.n();
    Plan plan;
    plan.n = n;
    plan.offsets.assign(n + 1, 0);

    // Count incoming entries per destination (diagonal counted when nonzero).
    for (uint32_t i = 0; i < n; ++i) {
        if (P.hold(i) > 0.0) ++plan.offsets[i + 1];
        for (uint32_t j : P.row_targets(i)) ++plan.offsets[j + 1];
    }
    for (uint32_t j = 0; j < n; ++j) plan.offsets[j + 1] += plan.offsets[j];
    plan.src.resize(plan.offsets[n]);
    plan.w.resize(plan.offsets[n]);

    std::vector<uint32_t> cursor(plan.offsets.begin(), plan.offsets.end() - 1);
    // Row-ascending fill yields ascending sources per destination.
    for (uint32_t i = 0; i < n; ++i) {
        if (P.hold(i) > 0.0) {
            plan.src[cursor[i]] = i;
            plan.w[cursor[i]] = P.hold(i);
            ++cursor[i];
        }
        auto targets = P.row_targets(i);
        auto probs = P.row_probs(i);
        for (size_t k = 0; k < targets.size(); ++k) {
            uint32_t j = targets[k];
            plan.src[cursor[j]] = i;
            plan.w[cursor[j]] = probs[k];
            ++cursor[j];
        }
    }

    return plan;
}

namespace {

void step_scalar(const Plan& plan, const double* in, double* out, size_t width, size_t stride) {
    constexpr uint32_t kMaxTerms = 16;
    const double* xs[kMaxTerms];
    double ws[kMaxTerms];
    for (uint32_t j = 0; j < plan.n; ++j) {
        uint32_t b = plan.offsets[j];
        uint32_t e = plan.offsets[j + 1];
        double* o = out + static_cast<size_t>(j) * stride;
        if (b == e) {
            std::memset(o, 0, width * sizeof(double));
            continue;
        }
        uint32_t nt = std::min(e - b, kMaxTerms);
        for (uint32_t k = 0; k < nt; ++k) {
            ws[k] = plan.w[b + k];
            xs[k] = in + static_cast<size_t>(plan.src[b + k]) * stride;
        }
        for (size_t s = 0; s < width; ++s) {
            double acc = ws[0] * xs[0][s];
            for (uint32_t k = 1; k < nt; ++k) acc = std::fma(ws[k], xs[k][s], acc);
            o[s] = acc;
        }
        // Rare overflow beyond kMaxTerms continues the same per-element chain.
        for (uint32_t k = b + nt; k < e; ++k) {
            const double wk = plan.w[k];
            const double* xk = in + static_cast<size_t>(plan.src[k]) * stride;
            for (size_t s = 0; s < width; ++s) o[s] = std::fma(wk, xk[s], o[s]);
        }
    }
}

void tv_mass_scalar(const double* in, uint32_t n, size_t width, size_t stride, double uniform,
                    double* tv, double* mass) {
    for (size_t s = 0; s < width; ++s) {
        double tv_acc = 0.0, tv_comp = 0.0;
        double m_acc = 0.0, m_comp = 0.0;
        const double* p = in + s;
        for (uint32_t j = 0; j < n; ++j, p += stride) {
            double x = *p;
            double dev = std::abs(x - uniform);
            double t = tv_acc + dev;
            tv_comp += std::abs(tv_acc) >= std::abs(dev) ? (tv_acc - t) + dev : (dev - t) + tv_acc;
            tv_acc = t;
            t = m_acc + x;
            m_comp += std::abs(m_acc) >= std::abs(x) ? (m_acc - t) + x : (x - t) + m_acc;
            m_acc = t;
        }
        tv[s] = tv_acc + tv_comp;
        mass[s] = m_acc + m_comp;
    }
}

const Backend kScalar{"scalar", step_scalar, tv_mass_scalar};

}  // namespace

const Backend& scalar_backend() { return kScalar; }

#if !defined(CYCLEMIX_WITH_AVX2_TU)
const Backend* avx2_backend() { return nullptr; }
#endif
#if !defined(CYCLEMIX_WITH_NEON_TU)
const Backend* neon_backend() { return nullptr; }
#endif

const Backend& select_backend(std::string_view request) {
    if (request.empty() || request == "auto") {
        if (const Backend* b = avx2_backend()) return *b;
        if (const Backend* b = neon_backend()) return *b;
        return kScalar;
    }
    if (request == "scalar") return kScalar;
    if (request == "avx2") {
        if (const Backend* b = avx2_backend()) return *b;
        raise(ErrorKind::InvalidParameter, "avx2 kernels unavailable on this CPU");
    }
    if (request == "neon") {
        if (const Backend* b = neon_backend()) return *b;
        raise(ErrorKind::InvalidParameter, "neon kernels unavailable on this CPU");
    }
    raise(ErrorKind::InvalidParameter, "unknown kernel backend '" + std::string(request) + "'");
}

std::vector<const Backend*> available_backends() {
    std::vector<const Backend*> v{&kScalar};
    if (const Backend* b = avx2_backend()) v.push_back(b);
    if (const Backend* b = neon_backend()) v.push_back(b);
    return v;
}

}  // namespace cyclemix::kernels
