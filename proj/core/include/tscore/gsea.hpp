#pragma once

// Gene-set enrichment with the unweighted two-sample Kolmogorov-Smirnov
// statistic between scores inside and outside a set.

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

namespace tscore
{

using ScoreMap = std::unordered_map<std::string, double>;

struct GeneSet
{
    std::string set_id;
    std::vector<std::string> members;  // sorted, unique, nonempty
    std::size_t source_line = 0;
};

// GMT: set_id, description, then member genes, tab separated. Repeated
// members are collapsed; a line without members is a DataError.
auto read_gmt(std::istream& in, const std::string& source) -> std::vector<GeneSet>;

// sup_t |F_S(t) - F_{S^c}(t)| over the scored genes, evaluated after all
// genes tied at each score are consumed. Throws std::invalid_argument when
// either side is empty.
auto ks_statistic(const ScoreMap& scores, const GeneSet& set) -> double;

// Kolmogorov tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2), with
// the effective-size correction lambda = (sqrt(m) + 0.12 + 0.11 / sqrt(m)) D,
// m = k k' / (k + k').
auto ks_asymptotic_pvalue(double statistic, std::size_t k, std::size_t k_prime) -> double;

struct GseaResult
{
    std::string set_id;
    std::size_t k = 0;
    std::size_t k_prime = 0;
    double ks_stat = 0.0;
    double p_perm = 1.0;
    double p_asymptotic = 1.0;
};

struct GseaOptions
{
    std::size_t min_size = 10;
    std::size_t perm_reps = 999;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

// Sets are restricted to scored members; those with fewer than min_size (or
// covering every scored gene) are skipped. p_perm = (1 + #{D_perm >= D}) /
// (1 + perm_reps) with membership labels permuted. Sorted by p_perm, then
// descending statistic, then set id. Throws DataError if no set survives.
auto run_gsea(const ScoreMap& scores, const std::vector<GeneSet>& sets,
              const GseaOptions& options) -> std::vector<GseaResult>;

void write_gsea(std::ostream& out, const std::vector<GseaResult>& results);

}  // namespace tscore
