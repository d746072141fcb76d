#pragma once

// Polynomial machinery behind the hybrid estimators of |theta| from a single
// observation X ~ N(theta, 1).
//
// G_K is the degree-2K Chebyshev expansion of |x| on [-1, 1],
//
//   G_K(x) = (2/pi) T_0(x) + (4/pi) sum_{k=1..K} (-1)^{k+1} T_{2k}(x) / (4k^2 - 1)
//          = sum_{k=0..K} g_{2k} x^{2k},
//
// with uniform error 2 / (pi (2K + 1)). Replacing x^{2k} by M^{-2k} H_{2k}(X),
// where H_k are the probabilists' Hermite polynomials (E H_k(X) = theta^k),
// gives an unbiased estimator of M G_K(theta / M). The statistic used here
// drops the k = 0 term:
//
//   S_K(X) = sum_{k=1..K} g_{2k} M^{1-2k} H_{2k}(X),   delta_K(X) = min(S_K(X), t_max).
//
// The variant that keeps the constant term (sum from k = 0) differs from S_K
// by M g_0 and is not used by any estimator.

#include <cstdint>
#include <vector>

namespace tscore
{

inline constexpr int kMaxChebyshevDegree = 60;
inline constexpr int kMaxHalfDegree = 30;
inline constexpr int kDefaultHalfDegree = 8;

// Monomial coefficients of T_k, index j holding the coefficient of x^j.
// Every entry is an integer represented exactly. Throws for k outside [0, 60].
auto cheb_coeffs(int k) -> std::vector<double>;

// Even-monomial coefficients of G_K.
struct ChebCoeffs
{
    int K = 0;
    std::vector<double> g;  // g[k] multiplies x^{2k}, k = 0..K

    // Horner in x^2.
    [[nodiscard]] auto operator()(double x) const noexcept -> double;
};

// Throws for K outside [1, 30].
auto gk_coeffs(int K) -> ChebCoeffs;

// H_0(x) .. H_max_degree(x) from H_{k+1} = x H_k - k H_{k-1}.
struct HermiteTable
{
    int max_degree = 0;
    std::vector<double> values;

    [[nodiscard]] auto operator[](int k) const -> double { return values.at(static_cast<std::size_t>(k)); }
};

// Throws for max_degree outside [0, 60].
auto hermite_eval(int max_degree, double x) -> HermiteTable;

// Tuning for S_K / delta_K and the estimator thresholds at panel length n.
// Holds the precomputed Hermite weights g_{2k} M^{1-2k}.
class ApproxConfig
{
public:
    // Defaults: scale M = 8 sqrt(log n), ceiling t_max = n^2.
    explicit ApproxConfig(std::uint64_t n, int K = kDefaultHalfDegree);
    ApproxConfig(std::uint64_t n, int K, double scale, double ceiling);

    [[nodiscard]] auto n() const noexcept -> std::uint64_t { return n_; }
    [[nodiscard]] auto half_degree() const noexcept -> int { return coeffs_.K; }
    [[nodiscard]] auto scale() const noexcept -> double { return scale_; }
    [[nodiscard]] auto ceiling() const noexcept -> double { return ceiling_; }
    [[nodiscard]] auto coeffs() const noexcept -> const ChebCoeffs& { return coeffs_; }

    // sqrt(2 log n): below it the thresholded estimators report 0.
    [[nodiscard]] auto lower_threshold() const noexcept -> double { return lower_; }
    // 2 sqrt(2 log n): above it the hybrid estimators switch to |x|.
    [[nodiscard]] auto upper_threshold() const noexcept -> double { return upper_; }

    // weights()[k-1] = g_{2k} M^{1-2k}, k = 1..K.
    [[nodiscard]] auto weights() const noexcept -> const std::vector<double>& { return weights_; }

    static auto default_scale(std::uint64_t n) -> double;
    static auto default_ceiling(std::uint64_t n) -> double;

private:
    std::uint64_t n_;
    double scale_;
    double ceiling_;
    double lower_;
    double upper_;
    ChebCoeffs coeffs_;
    std::vector<double> weights_;
};

// S_K(x), accumulated from k = K down to 1 with compensated summation.
auto s_k(double x, const ApproxConfig& cfg) noexcept -> double;

// min(S_K(x), t_max).
auto delta_k(double x, const ApproxConfig& cfg) noexcept -> double;

// K = max(1, floor(r log n)) for the growing-degree regime; the theory asks for
// 0 < r < (2 beta - 1) / 12 with sparsity s ~ n^beta, beta unknown in practice.
auto k_from_rate(double r, std::uint64_t n) -> int;

}  // namespace tscore
