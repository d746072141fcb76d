#include "tscore/gsea.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "tscore/error.hpp"
#include "tscore/parallel.hpp"
#include "tscore/rng.hpp"
#include "tscore/tsv.hpp"

namespace tscore
{

auto read_gmt(std::istream& in, const std::string& source) -> std::vector<GeneSet>
{
    // GMT has no header; Reader still skips blank and '#' lines.
    tsv::Reader reader(in, source);
    std::vector<GeneSet> sets;
    while (auto row = reader.next())
    {
        if (row->size() < 3)
        {
            throw DataError(reader.where("gene set line needs an id, a description and at "
                                         "least one gene"));
        }
        GeneSet set{(*row)[0], {}, reader.line_number()};
        if (set.set_id.empty())
        {
            throw DataError(reader.where("empty gene set id"));
        }
        for (std::size_t i = 2; i < row->size(); ++i)
        {
            if (!(*row)[i].empty())
            {
                set.members.push_back(std::move((*row)[i]));
            }
        }
        std::sort(set.members.begin(), set.members.end());
        set.members.erase(std::unique(set.members.begin(), set.members.end()), set.members.end());
        if (set.members.empty())
        {
            throw DataError(reader.where("gene set '" + set.set_id + "' has no members"));
        }
        sets.push_back(std::move(set));
    }
    return sets;
}

namespace
{

// Scored genes sorted by score, with tie groups, so that the statistic for
// any membership labelling is a single sweep in integer arithmetic.
class RankedScores
{
public:
    explicit RankedScores(const ScoreMap& scores)
    {
        order_.reserve(scores.size());
        for (const auto& [gene, value] : scores)
        {
            order_.emplace_back(value, gene);
        }
        std::sort(order_.begin(), order_.end());
        position_.reserve(order_.size());
        for (std::size_t i = 0; i < order_.size(); ++i)
        {
            position_.emplace(order_[i].second, i);
            if (i + 1 == order_.size() || order_[i + 1].first != order_[i].first)
            {
                group_end_.push_back(i + 1);
            }
        }
    }

    [[nodiscard]] auto size() const noexcept -> std::size_t { return order_.size(); }

    [[nodiscard]] auto position(const std::string& gene) const -> std::optional<std::size_t>
    {
        const auto it = position_.find(gene);
        if (it == position_.end())
        {
            return std::nullopt;
        }
        return it->second;
    }

    // max over tie groups of |i k' - j k|, with i in-set and j out-of-set
    // genes consumed so far. D = that / (k k').
    [[nodiscard]] auto sweep(const std::vector<char>& in_set, std::size_t k) const -> std::uint64_t
    {
        const auto kk = static_cast<std::int64_t>(k);
        const auto kp = static_cast<std::int64_t>(order_.size() - k);
        std::int64_t in = 0;
        std::int64_t out = 0;
        std::int64_t best = 0;
        std::size_t i = 0;
        for (const auto end : group_end_)
        {
            for (; i < end; ++i)
            {
                if (in_set[i] != 0)
                {
                    ++in;
                }
                else
                {
                    ++out;
                }
            }
            best = std::max(best, std::abs(in * kp - out * kk));
        }
        return static_cast<std::uint64_t>(best);
    }

private:
    std::vector<std::pair<double, std::string>> order_;
    std::unordered_map<std::string, std::size_t> position_;
    std::vector<std::size_t> group_end_;
};

auto to_statistic(std::uint64_t scaled, std::size_t k, std::size_t k_prime) -> double
{
    return static_cast<double>(scaled) /
           (static_cast<double>(k) * static_cast<double>(k_prime));
}

}  // namespace

auto ks_statistic(const ScoreMap& scores, const GeneSet& set) -> double
{
    const RankedScores ranked(scores);
    std::vector<char> in_set(ranked.size(), 0);
    std::size_t k = 0;
    for (const auto& gene : set.members)
    {
        if (const auto pos = ranked.position(gene))
        {
            in_set[*pos] = 1;
            ++k;
        }
    }
    if (k == 0 || k == ranked.size())
    {
        throw std::invalid_argument("ks_statistic: gene set '" + set.set_id +
                                    "' leaves one side empty");
    }
    return to_statistic(ranked.sweep(in_set, k), k, ranked.size() - k);
}

auto ks_asymptotic_pvalue(double statistic, std::size_t k, std::size_t k_prime) -> double
{
    if (k == 0 || k_prime == 0)
    {
        throw std::invalid_argument("ks_asymptotic_pvalue: empty sample");
    }
    const double m = static_cast<double>(k) * static_cast<double>(k_prime) /
                     static_cast<double>(k + k_prime);
    const double root = std::sqrt(m);
    const double lambda = (root + 0.12 + 0.11 / root) * statistic;
    if (lambda < 1e-3)
    {
        return 1.0;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j)
    {
        const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum))
        {
            break;
        }
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

auto run_gsea(const ScoreMap& scores, const std::vector<GeneSet>& sets,
              const GseaOptions& options) -> std::vector<GseaResult>
{
    if (options.min_size < 1)
    {
        throw std::invalid_argument("run_gsea: min_size must be at least 1");
    }
    const RankedScores ranked(scores);
    const std::size_t total = ranked.size();

    struct Candidate
    {
        const GeneSet* set;
        std::vector<char> in_set;
        std::size_t k;
    };
    std::vector<Candidate> candidates;
    for (const auto& set : sets)
    {
        Candidate c{&set, std::vector<char>(total, 0), 0};
        for (const auto& gene : set.members)
        {
            if (const auto pos = ranked.position(gene))
            {
                c.in_set[*pos] = 1;
                ++c.k;
            }
        }
        if (c.k >= options.min_size && c.k < total)
        {
            candidates.push_back(std::move(c));
        }
    }
    if (candidates.empty())
    {
        throw DataError("gsea: no gene set has at least " + std::to_string(options.min_size) +
                        " scored members");
    }

    std::vector<GseaResult> results(candidates.size());
    parallel_for(candidates.size(), options.threads, [&](std::size_t c) {
        const auto& cand = candidates[c];
        const std::size_t k = cand.k;
        const std::size_t k_prime = total - k;
        const std::uint64_t observed = ranked.sweep(cand.in_set, k);

        Engine rng = make_engine(derive_key(options.seed, stable_hash(cand.set->set_id)));
        std::vector<std::size_t> idx(total);
        std::iota(idx.begin(), idx.end(), 0);
        std::vector<char> labels(total, 0);
        std::size_t exceed = 0;
        for (std::size_t rep = 0; rep < options.perm_reps; ++rep)
        {
            // Partial Fisher-Yates: the first k entries form a uniform k-subset.
            for (std::size_t i = 0; i < k; ++i)
            {
                std::uniform_int_distribution<std::size_t> pick(i, total - 1);
                std::swap(idx[i], idx[pick(rng)]);
                labels[idx[i]] = 1;
            }
            if (ranked.sweep(labels, k) >= observed)
            {
                ++exceed;
            }
            for (std::size_t i = 0; i < k; ++i)
            {
                labels[idx[i]] = 0;
            }
        }

        auto& r = results[c];
        r.set_id = cand.set->set_id;
        r.k = k;
        r.k_prime = k_prime;
        r.ks_stat = to_statistic(observed, k, k_prime);
        r.p_perm = static_cast<double>(1 + exceed) / static_cast<double>(1 + options.perm_reps);
        r.p_asymptotic = ks_asymptotic_pvalue(r.ks_stat, k, k_prime);
    });

    std::sort(results.begin(), results.end(), [](const GseaResult& a, const GseaResult& b) {
        if (a.p_perm != b.p_perm)
        {
            return a.p_perm < b.p_perm;
        }
        if (a.ks_stat != b.ks_stat)
        {
            return a.ks_stat > b.ks_stat;
        }
        return a.set_id < b.set_id;
    });
    return results;
}

void write_gsea(std::ostream& out, const std::vector<GseaResult>& results)
{
    out << "set_id\tk\tks_stat\tp_perm\tp_asymptotic\n";
    for (const auto& r : results)
    {
        out << r.set_id << '\t' << r.k << '\t' << tsv::format_double(r.ks_stat) << '\t'
            << tsv::format_double(r.p_perm) << '\t' << tsv::format_double(r.p_asymptotic)
            << '\n';
    }
}

}  // namespace tscore
