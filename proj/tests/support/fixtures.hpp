#pragma once

// Synthetic GWAS/eQTL panels: one gene sharing triangle-shaped signal blocks
// with the GWAS means, the rest carrying signal on unrelated blocks.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "tscore/genomics.hpp"
#include "tscore/simulation.hpp"
#include "tscore/tsv.hpp"

namespace tscore::testing
{

struct PlantedFixture
{
    GwasPanel gwas;
    EqtlPanel eqtl;
    std::string planted_id = "planted";
};

inline auto make_planted_fixture(std::uint64_t n, std::size_t null_genes, std::uint64_t seed,
                                 std::size_t chromosomes = 10) -> PlantedFixture
{
    Engine rng(seed);
    SignalSpec spec;
    spec.n = n;
    spec.s = 100;
    const Means shared = gen_means(spec, rng);

    PlantedFixture f;
    f.gwas.z = sample_mvn(shared.mu, CovKind::Identity, rng);
    const std::uint64_t per_chrom = n / chromosomes;
    for (std::uint64_t i = 0; i < n; ++i)
    {
        f.gwas.snp_ids.push_back("rs" + std::to_string(i + 1));
        const std::uint64_t c = std::min<std::uint64_t>(i / per_chrom, chromosomes - 1);
        f.gwas.chrom.push_back("chr" + std::to_string(c + 1));
    }
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        all[i] = i;
    }
    f.eqtl.genes.push_back(
        GeneEqtl{f.planted_id, all, sample_mvn(shared.theta, CovKind::Identity, rng)});
    SignalSpec other = spec;
    other.shared_support = false;
    for (std::size_t g = 0; g < null_genes; ++g)
    {
        const Means m = gen_means(other, rng);
        f.eqtl.genes.push_back(GeneEqtl{"null" + std::to_string(g + 1), all,
                                        sample_mvn(m.theta, CovKind::Identity, rng)});
    }
    return f;
}

inline void write_gwas_tsv(std::ostream& out, const GwasPanel& gwas)
{
    out << (gwas.has_chrom() ? "snp_id\tchrom\tz\n" : "snp_id\tz\n");
    for (std::size_t i = 0; i < gwas.size(); ++i)
    {
        out << gwas.snp_ids[i] << '\t';
        if (gwas.has_chrom())
        {
            out << gwas.chrom[i] << '\t';
        }
        out << tsv::format_double(gwas.z[i]) << '\n';
    }
}

inline void write_eqtl_long(std::ostream& out, const EqtlPanel& eqtl, const GwasPanel& gwas)
{
    out << "gene_id\tsnp_id\tz\n";
    for (const auto& gene : eqtl.genes)
    {
        for (std::size_t j = 0; j < gene.z.size(); ++j)
        {
            out << gene.gene_id << '\t' << gwas.snp_ids[gene.gwas_index[j]] << '\t'
                << tsv::format_double(gene.z[j]) << '\n';
        }
    }
}

}  // namespace tscore::testing
