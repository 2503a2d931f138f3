#pragma once

// Scalar entropy kernels: the q-logarithm, Boltzmann-Gibbs-Shannon and
// Tsallis entropies over 256-bin intensity histograms, and the non-additive
// composition law for independent systems.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>

#include "qentropy/error.hpp"

namespace qentropy {

inline constexpr std::size_t kBins = 256;

/// Raw intensity counts; bin x holds the number of pixels with intensity x.
struct Histogram {
    std::array<std::uint64_t, kBins> counts{};
    std::uint64_t total = 0;

    void add(std::uint8_t intensity) noexcept {
        ++counts[intensity];
        ++total;
    }
};

/// Probability-normalized histogram. Entries are >= 0 and sum to 1.
struct NormalizedHistogram {
    std::array<double, kBins> probs{};
};

/// Entropic index q. Any finite real is accepted.
class EntropicIndex {
public:
    constexpr EntropicIndex() = default;
    EntropicIndex(double q) : q_(q) {  // NOLINT(google-explicit-constructor)
        if (!std::isfinite(q)) throw DomainError("entropic index q must be finite");
    }
    constexpr double value() const noexcept { return q_; }
    constexpr operator double() const noexcept { return q_; }  // NOLINT

private:
    double q_ = 1.0;
};

/// |q - 1| below this uses the natural-log branch of q_log.
inline constexpr double kQLogSwitch = 1e-8;

/// Deformed logarithm ln_q(x) = (x^(1-q) - 1) / (1 - q), with ln_1 = ln.
///
/// Evaluated as expm1((1-q) ln x) / (1-q) so that no precision is lost as
/// q approaches 1. Inside the switch band the second-order expansion
/// ln x + (1-q) ln^2 x / 2 is used; it equals ln x at q = 1 and meets the
/// outer branch continuously.
inline double q_log(double x, EntropicIndex q) {
    if (!std::isfinite(x) || x <= 0.0)
        throw DomainError("q_log: argument x must be positive and finite, got " + std::to_string(x));
    const double d = 1.0 - q.value();
    const double lnx = std::log(x);
    if (std::abs(d) < kQLogSwitch) return lnx + 0.5 * d * lnx * lnx;
    return std::expm1(d * lnx) / d;
}

inline NormalizedHistogram normalize(const Histogram& h) {
    if (h.total == 0) throw EmptyHistogramError();
    NormalizedHistogram out;
    const double total = static_cast<double>(h.total);
    for (std::size_t x = 0; x < kBins; ++x) out.probs[x] = static_cast<double>(h.counts[x]) / total;
    return out;
}

/// -sum p ln p over an arbitrary discrete distribution; empty bins contribute 0.
inline double bgs_entropy(std::span<const double> probs) {
    double s = 0.0;
    for (double p : probs)
        if (p > 0.0) s += p * std::log(1.0 / p);
    return s;
}

inline double bgs_entropy(const NormalizedHistogram& p) { return bgs_entropy(std::span<const double>(p.probs)); }

/// sum p ln_q(1/p) over an arbitrary discrete distribution; empty bins contribute 0.
inline double tsallis_entropy(std::span<const double> probs, EntropicIndex q) {
    double s = 0.0;
    for (double p : probs)
        if (p > 0.0) s += p * q_log(1.0 / p, q);
    return s;
}

inline double tsallis_entropy(const NormalizedHistogram& p, EntropicIndex q) {
    return tsallis_entropy(std::span<const double>(p.probs), q);
}

/// Entropy of the union of two independent systems:
/// s_a + s_b + (1 - q) s_a s_b. Reduces to plain addition at q = 1.
inline double compose_entropies(double s_a, double s_b, EntropicIndex q) noexcept {
    return s_a + s_b + (1.0 - q.value()) * s_a * s_b;
}

}  // namespace qentropy
