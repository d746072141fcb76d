#pragma once

// Monte-Carlo study of the T-score estimators: sparse block-wise triangular
// mean vectors, block-diagonal noise covariance, rescaled RMSE per estimator.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "tscore/estimators.hpp"
#include "tscore/rng.hpp"

namespace tscore
{

struct SignalSpec
{
    std::uint64_t n = 150000;
    std::uint64_t s = 100;          // nonzero coordinates per vector
    std::uint64_t block_len = 10;
    double peak_low = 3.0;
    double peak_high = 5.0;
    bool shared_support = true;
    std::uint64_t seed = 0;

    // Throws std::invalid_argument unless s <= n, block_len divides both s and
    // n, and peak_low <= peak_high.
    void validate() const;
};

enum class CovKind
{
    Identity,
    Toeplitz10,        // 10x10 blocks, entry 1 - 0.1 |i - j|
    Exchangeable1000,  // 1000x1000 blocks, off-diagonal 0.5
};

inline constexpr std::array<CovKind, 3> kAllCovariances = {
    CovKind::Identity, CovKind::Toeplitz10, CovKind::Exchangeable1000};

auto to_string(CovKind cov) -> std::string_view;
auto parse_cov(std::string_view name) -> std::optional<CovKind>;
auto cov_block_size(CovKind cov) noexcept -> std::size_t;

// Dense copy of the repeated diagonal block, row-major.
auto cov_block(CovKind cov) -> std::vector<double>;

struct Means
{
    std::vector<double> theta;
    std::vector<double> mu;
};

// Picks s / block_len blocks uniformly without replacement (once for both
// vectors when shared_support, else once each). Inside a chosen block,
// 1-based position j carries peak * min(j, L + 1 - j) / ((L + 1) / 2), with
// peak ~ U[peak_low, peak_high] drawn independently per vector and block.
auto gen_means(const SignalSpec& spec, Engine& rng) -> Means;

// mean + block-diagonal correlated N(0, Sigma) noise. The lower Cholesky
// factor of each block shape is computed once per process.
auto sample_mvn(std::span<const double> mean, CovKind cov, Engine& rng) -> std::vector<double>;

// (1 / s) sqrt(mean((estimate - truth)^2)).
auto rmse(std::span<const double> estimates, std::span<const double> truths, std::uint64_t s)
    -> double;

struct SimStudySpec
{
    SignalSpec signal;
    CovKind cov = CovKind::Identity;
    std::uint64_t reps = 100;
    std::vector<EstimatorKind> estimators{kAllEstimators.begin(), kAllEstimators.end()};
    int K = kDefaultHalfDegree;

    void validate() const;
};

struct RmseKey
{
    std::uint64_t n = 0;
    std::uint64_t s = 0;
    CovKind cov = CovKind::Identity;
    EstimatorKind estimator = EstimatorKind::Naive;

    auto operator<=>(const RmseKey&) const = default;
};

class RmseTable
{
public:
    void set(const RmseKey& key, double value);
    void merge(const RmseTable& other);

    [[nodiscard]] auto at(const RmseKey& key) const -> double;
    [[nodiscard]] auto contains(const RmseKey& key) const -> bool { return cells_.contains(key); }
    [[nodiscard]] auto size() const noexcept -> std::size_t { return cells_.size(); }
    [[nodiscard]] auto cells() const noexcept -> const std::map<RmseKey, double>& { return cells_; }

    // Header n, s, cov, estimator, rmse; one row per cell in key order.
    void write_tsv(std::ostream& out) const;

    auto operator==(const RmseTable&) const -> bool = default;

private:
    std::map<RmseKey, double> cells_;
};

// Per-replicate draws: fresh means and noise, truth by true_tscore, every
// requested estimator on the same draw (split variants share one split).
// Replicate r uses streams derived from (signal.seed, r), so the table is
// identical for any thread count.
auto run_study(const SimStudySpec& spec, unsigned threads = 0) -> RmseTable;

}  // namespace tscore
