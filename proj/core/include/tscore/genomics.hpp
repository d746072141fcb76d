#pragma once

// GWAS x eQTL integration: align per-SNP z-scores, score each gene by its
// normalized T-score against the GWAS panel, rank genes, and build
// permutation nulls by breaking the SNP matching of the GWAS z-scores.

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tscore/estimators.hpp"
#include "tscore/rng.hpp"

namespace tscore
{

struct GwasPanel
{
    std::vector<std::string> snp_ids;
    std::vector<std::string> chrom;  // empty when the source had no chrom column
    std::vector<double> z;

    [[nodiscard]] auto size() const noexcept -> std::size_t { return z.size(); }
    [[nodiscard]] auto has_chrom() const noexcept -> bool { return !chrom.empty(); }

    // Throws DataError on unequal lengths, duplicate ids or non-finite z.
    void validate() const;
};

// One gene's eQTL z-scores, restricted to SNPs present in the GWAS panel and
// ordered as in it: z[j] belongs to GWAS position gwas_index[j].
struct GeneEqtl
{
    std::string gene_id;
    std::vector<std::size_t> gwas_index;
    std::vector<double> z;
};

struct EqtlPanel
{
    std::vector<GeneEqtl> genes;
};

struct LoadOptions
{
    std::size_t min_snps = 100;  // genes with fewer matched SNPs are dropped
};

struct LoadedPanels
{
    GwasPanel gwas;
    EqtlPanel eqtl;
    std::size_t dropped_genes = 0;
};

// GWAS: header with snp_id and z, chrom optional.
auto read_gwas(std::istream& in, const std::string& source) -> GwasPanel;

// eQTL in long form (gene_id, snp_id, z) or matrix form (snp_id then one
// column per gene; "NA" cells skipped). The form is detected from the header.
// Genes are aligned to `gwas`. Throws DataError with "source:line:" context on
// malformed rows, duplicates, zero SNP overlap, or no surviving gene.
auto read_eqtl(std::istream& in, const std::string& source, const GwasPanel& gwas,
               const LoadOptions& options, std::size_t* dropped = nullptr) -> EqtlPanel;

auto load_panels(const std::string& gwas_path, const std::string& eqtl_path,
                 const LoadOptions& options = {}) -> LoadedPanels;

// sqrt(max(sum z^2 - n, 0)), using E z_i^2 = theta_i^2 + 1. Requires n >= 2.
auto l2_norm_estimate(std::span<const double> z) -> double;

enum class ScoreStatus
{
    Defined,
    Undefined,  // a norm estimate is 0
};

struct GeneScore
{
    std::string gene_id;
    double t_hat = 0.0;
    double theta_norm = 0.0;
    double mu_norm = 0.0;
    double normalized = 0.0;  // NaN when Undefined
    std::size_t rank = 0;     // dense, descending normalized; Undefined last
    ScoreStatus status = ScoreStatus::Defined;
};

struct ScoreOptions
{
    EstimatorKind kind = EstimatorKind::HybridThreshNoSplit;
    int K = kDefaultHalfDegree;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

// Seed of a gene's splitting stream.
auto gene_seed(std::uint64_t seed, std::string_view gene_id) noexcept -> std::uint64_t;

// The gene's eQTL panel (x) and the matching GWAS sub-panel (y), labelled by
// SNP id.
auto gene_panels(const GwasPanel& gwas, const GeneEqtl& gene) -> std::pair<ZPanel, ZPanel>;

// Gene panels of length n_g give ApproxConfig(n_g, K). Output is sorted by
// rank, then gene id.
auto score_genes(const GwasPanel& gwas, const EqtlPanel& eqtl, const ScoreOptions& options)
    -> std::vector<GeneScore>;

void write_scores(std::ostream& out, const std::vector<GeneScore>& scores);

auto permute_random(const GwasPanel& gwas, Engine& rng) -> GwasPanel;

// Rotates each chromosome's z-subvector: new[i] = old[(i + offset) mod len],
// chromosomes taken in order of first appearance. offsets.size() must equal
// the number of distinct chromosomes.
auto rotate_chromosomes(const GwasPanel& gwas, std::span<const std::size_t> offsets)
    -> GwasPanel;

// Independent uniform offset per chromosome. Throws DataError without chrom.
auto permute_cyclic(const GwasPanel& gwas, Engine& rng) -> GwasPanel;

enum class PermutationMode
{
    Random,
    Cyclic,
};

struct NullDistribution
{
    PermutationMode mode = PermutationMode::Random;
    std::size_t reps = 0;
    std::vector<std::string> gene_ids;
    // scores[g][r]: normalized score of gene_ids[g] in replicate r (NaN when
    // undefined).
    std::vector<std::vector<double>> scores;
};

auto null_distribution(const GwasPanel& gwas, const EqtlPanel& eqtl, PermutationMode mode,
                       std::size_t reps, const ScoreOptions& options) -> NullDistribution;

// gene_id, rep, normalized.
void write_null(std::ostream& out, const NullDistribution& null);

// rank, rep, normalized: per replicate, defined scores in descending order.
void write_ranked_null(std::ostream& out, const NullDistribution& null);

}  // namespace tscore
