#include "tscore/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "tscore/parallel.hpp"
#include "tscore/summation.hpp"
#include "tscore/tsv.hpp"

namespace tscore
{

void SignalSpec::validate() const
{
    if (n == 0 || s == 0 || block_len == 0)
    {
        throw std::invalid_argument("SignalSpec: n, s and block_len must be positive");
    }
    if (s > n)
    {
        throw std::invalid_argument("SignalSpec: s exceeds n");
    }
    if (s % block_len != 0 || n % block_len != 0)
    {
        throw std::invalid_argument("SignalSpec: block_len must divide both s and n");
    }
    if (!(peak_low <= peak_high))
    {
        throw std::invalid_argument("SignalSpec: peak_low must not exceed peak_high");
    }
}

auto to_string(CovKind cov) -> std::string_view
{
    switch (cov)
    {
    case CovKind::Identity:
        return "identity";
    case CovKind::Toeplitz10:
        return "toeplitz10";
    case CovKind::Exchangeable1000:
        return "exchangeable1000";
    }
    return "unknown";
}

auto parse_cov(std::string_view name) -> std::optional<CovKind>
{
    for (const auto cov : kAllCovariances)
    {
        if (to_string(cov) == name)
        {
            return cov;
        }
    }
    return std::nullopt;
}

auto cov_block_size(CovKind cov) noexcept -> std::size_t
{
    switch (cov)
    {
    case CovKind::Identity:
        return 1;
    case CovKind::Toeplitz10:
        return 10;
    case CovKind::Exchangeable1000:
        return 1000;
    }
    return 1;
}

auto cov_block(CovKind cov) -> std::vector<double>
{
    const std::size_t b = cov_block_size(cov);
    std::vector<double> m(b * b, 0.0);
    for (std::size_t i = 0; i < b; ++i)
    {
        for (std::size_t j = 0; j < b; ++j)
        {
            double v = 0.0;
            if (i == j)
            {
                v = 1.0;
            }
            else if (cov == CovKind::Toeplitz10)
            {
                v = 1.0 - 0.1 * static_cast<double>(i > j ? i - j : j - i);
            }
            else if (cov == CovKind::Exchangeable1000)
            {
                v = 0.5;
            }
            m[i * b + j] = v;
        }
    }
    return m;
}

namespace
{

auto factor_block(CovKind cov) -> Eigen::MatrixXd
{
    const auto b = static_cast<Eigen::Index>(cov_block_size(cov));
    const auto dense = cov_block(cov);
    const Eigen::MatrixXd sigma =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            dense.data(), b, b);
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
    {
        throw std::runtime_error("sample_mvn: covariance block is not positive definite");
    }
    return llt.matrixL();
}

auto cached_factor(CovKind cov) -> const Eigen::MatrixXd&
{
    static std::once_flag once_toeplitz;
    static std::once_flag once_exchangeable;
    static Eigen::MatrixXd toeplitz;
    static Eigen::MatrixXd exchangeable;
    if (cov == CovKind::Toeplitz10)
    {
        std::call_once(once_toeplitz, [] { toeplitz = factor_block(CovKind::Toeplitz10); });
        return toeplitz;
    }
    std::call_once(once_exchangeable,
                   [] { exchangeable = factor_block(CovKind::Exchangeable1000); });
    return exchangeable;
}

}  // namespace

auto gen_means(const SignalSpec& spec, Engine& rng) -> Means
{
    spec.validate();
    const std::uint64_t blocks = spec.n / spec.block_len;
    const std::uint64_t chosen = spec.s / spec.block_len;
    const std::uint64_t half = (spec.block_len + 1) / 2;
    std::uniform_real_distribution<double> peak_dist(spec.peak_low, spec.peak_high);

    std::vector<std::uint64_t> all(blocks);
    std::iota(all.begin(), all.end(), 0);
    auto pick = [&] {
        std::vector<std::uint64_t> out;
        out.reserve(chosen);
        std::sample(all.begin(), all.end(), std::back_inserter(out), chosen, rng);
        return out;
    };
    auto fill = [&](std::vector<double>& v, const std::vector<std::uint64_t>& support) {
        for (const auto block : support)
        {
            const double peak = peak_dist(rng);
            for (std::uint64_t j = 1; j <= spec.block_len; ++j)
            {
                const auto w = static_cast<double>(std::min(j, spec.block_len + 1 - j));
                v[block * spec.block_len + j - 1] = peak * w / static_cast<double>(half);
            }
        }
    };

    Means out{std::vector<double>(spec.n, 0.0), std::vector<double>(spec.n, 0.0)};
    const auto support_theta = pick();
    const auto support_mu = spec.shared_support ? support_theta : pick();
    fill(out.theta, support_theta);
    fill(out.mu, support_mu);
    return out;
}

auto sample_mvn(std::span<const double> mean, CovKind cov, Engine& rng) -> std::vector<double>
{
    const std::size_t b = cov_block_size(cov);
    if (mean.size() % b != 0)
    {
        throw std::invalid_argument("sample_mvn: length " + std::to_string(mean.size()) +
                                    " is not a multiple of the block size " +
                                    std::to_string(b));
    }
    std::normal_distribution<double> normal;
    std::vector<double> out(mean.begin(), mean.end());
    if (cov == CovKind::Identity)
    {
        for (auto& v : out)
        {
            v += normal(rng);
        }
        return out;
    }

    const auto& factor = cached_factor(cov);
    const auto bi = static_cast<Eigen::Index>(b);
    Eigen::VectorXd e(bi);
    for (std::size_t start = 0; start < out.size(); start += b)
    {
        for (Eigen::Index i = 0; i < bi; ++i)
        {
            e[i] = normal(rng);
        }
        Eigen::Map<Eigen::VectorXd> block(out.data() + start, bi);
        block.noalias() += factor.triangularView<Eigen::Lower>() * e;
    }
    return out;
}

auto rmse(std::span<const double> estimates, std::span<const double> truths, std::uint64_t s)
    -> double
{
    if (estimates.empty() || estimates.size() != truths.size())
    {
        throw std::invalid_argument("rmse: need equal, nonempty estimate and truth vectors");
    }
    if (s == 0)
    {
        throw std::invalid_argument("rmse: s must be positive");
    }
    const double sse = deterministic_sum(estimates.size(), [&](std::size_t i) {
        const double d = estimates[i] - truths[i];
        return d * d;
    });
    return std::sqrt(sse / static_cast<double>(estimates.size())) / static_cast<double>(s);
}

void SimStudySpec::validate() const
{
    signal.validate();
    if (reps == 0)
    {
        throw std::invalid_argument("SimStudySpec: reps must be at least 1");
    }
    if (estimators.empty())
    {
        throw std::invalid_argument("SimStudySpec: no estimators requested");
    }
    if (signal.n % cov_block_size(cov) != 0)
    {
        throw std::invalid_argument("SimStudySpec: n is not a multiple of the covariance block");
    }
    if (signal.n < 2)
    {
        throw std::invalid_argument("SimStudySpec: n must be at least 2");
    }
}

void RmseTable::set(const RmseKey& key, double value)
{
    if (!std::isfinite(value) || value < 0.0)
    {
        throw std::invalid_argument("RmseTable: cell value must be finite and nonnegative");
    }
    cells_[key] = value;
}

void RmseTable::merge(const RmseTable& other)
{
    for (const auto& [key, value] : other.cells_)
    {
        cells_[key] = value;
    }
}

void RmseTable::write_tsv(std::ostream& out) const
{
    out << "n\ts\tcov\testimator\trmse\n";
    for (const auto& [key, value] : cells_)
    {
        out << key.n << '\t' << key.s << '\t' << to_string(key.cov) << '\t'
            << to_string(key.estimator) << '\t' << tsv::format_double(value) << '\n';
    }
}

auto RmseTable::at(const RmseKey& key) const -> double
{
    const auto it = cells_.find(key);
    if (it == cells_.end())
    {
        throw std::out_of_range("RmseTable: missing cell");
    }
    return it->second;
}

namespace
{

// Stream tags under each replicate key.
constexpr std::uint64_t kTagMeans = 1;
constexpr std::uint64_t kTagNoise = 2;
constexpr std::uint64_t kTagSplit = 3;

}  // namespace

auto run_study(const SimStudySpec& spec, unsigned threads) -> RmseTable
{
    spec.validate();
    const std::size_t reps = spec.reps;
    const std::size_t kinds = spec.estimators.size();
    const ApproxConfig cfg(spec.signal.n, spec.K);
    const bool any_split = std::any_of(spec.estimators.begin(), spec.estimators.end(), uses_split);

    std::vector<double> truths(reps);
    std::vector<std::vector<double>> estimates(kinds, std::vector<double>(reps));

    parallel_for(reps, threads, [&](std::size_t r) {
        const std::uint64_t rep_key = derive_key(spec.signal.seed, r);
        Engine mean_rng = make_engine(derive_key(rep_key, kTagMeans));
        Engine noise_rng = make_engine(derive_key(rep_key, kTagNoise));

        const auto means = gen_means(spec.signal, mean_rng);
        const ZPanel x(sample_mvn(means.theta, spec.cov, noise_rng));
        const ZPanel y(sample_mvn(means.mu, spec.cov, noise_rng));
        truths[r] = true_tscore(means.theta, means.mu);

        const std::uint64_t split_seed = derive_key(rep_key, kTagSplit);
        SplitPanel xs;
        SplitPanel ys;
        if (any_split)
        {
            xs = split(x, split_seed, kStreamX);
            ys = split(y, split_seed, kStreamY);
        }
        for (std::size_t k = 0; k < kinds; ++k)
        {
            const auto kind = spec.estimators[k];
            estimates[k][r] = uses_split(kind) ? estimate_tscore_split(xs, ys, kind, cfg)
                                               : estimate_tscore_direct(x.z(), y.z(), kind, cfg);
        }
    });

    RmseTable table;
    for (std::size_t k = 0; k < kinds; ++k)
    {
        const RmseKey key{spec.signal.n, spec.signal.s, spec.cov, spec.estimators[k]};
        table.set(key, rmse(estimates[k], truths, spec.signal.s));
    }
    return table;
}

}  // namespace tscore
