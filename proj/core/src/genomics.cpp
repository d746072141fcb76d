#include "tscore/genomics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "tscore/error.hpp"
#include "tscore/parallel.hpp"
#include "tscore/summation.hpp"
#include "tscore/tsv.hpp"

namespace tscore
{

void GwasPanel::validate() const
{
    if (snp_ids.size() != z.size() || (!chrom.empty() && chrom.size() != z.size()))
    {
        throw DataError("GWAS panel: column lengths differ");
    }
    std::unordered_set<std::string_view> seen;
    seen.reserve(snp_ids.size());
    for (std::size_t i = 0; i < snp_ids.size(); ++i)
    {
        if (!seen.insert(snp_ids[i]).second)
        {
            throw DataError("GWAS panel: duplicate SNP id '" + snp_ids[i] + "'");
        }
        if (!std::isfinite(z[i]))
        {
            throw DataError("GWAS panel: non-finite z for SNP '" + snp_ids[i] + "'");
        }
    }
}

namespace
{

auto require_column(const tsv::Reader& reader, const std::vector<std::string>& header,
                    std::string_view name) -> std::size_t
{
    const auto col = tsv::find_column(header, name);
    if (!col)
    {
        throw DataError(reader.where("missing column '" + std::string(name) + "'"));
    }
    return *col;
}

auto parse_z(const tsv::Reader& reader, std::string_view field) -> double
{
    const auto v = tsv::parse_double(field);
    if (!v)
    {
        throw DataError(reader.where("malformed z-score '" + std::string(field) + "'"));
    }
    return *v;
}

}  // namespace

auto read_gwas(std::istream& in, const std::string& source) -> GwasPanel
{
    tsv::Reader reader(in, source);
    const auto header = reader.next();
    if (!header)
    {
        throw DataError(source + ": empty GWAS file");
    }
    const std::size_t snp_col = require_column(reader, *header, "snp_id");
    const std::size_t z_col = require_column(reader, *header, "z");
    const auto chrom_col = tsv::find_column(*header, "chrom");

    GwasPanel panel;
    std::unordered_set<std::string> seen;
    while (auto row = reader.next())
    {
        if (row->size() != header->size())
        {
            throw DataError(reader.where("expected " + std::to_string(header->size()) +
                                         " fields, found " + std::to_string(row->size())));
        }
        auto& id = (*row)[snp_col];
        if (!seen.insert(id).second)
        {
            throw DataError(reader.where("duplicate SNP id '" + id + "'"));
        }
        panel.z.push_back(parse_z(reader, (*row)[z_col]));
        panel.snp_ids.push_back(std::move(id));
        if (chrom_col)
        {
            panel.chrom.push_back(std::move((*row)[*chrom_col]));
        }
    }
    if (panel.z.empty())
    {
        throw DataError(source + ": GWAS file has no data rows");
    }
    return panel;
}

namespace
{

struct RawGene
{
    std::string gene_id;
    std::vector<std::pair<std::size_t, double>> entries;  // (GWAS position, z)
};

auto read_long_form(tsv::Reader& reader, const std::vector<std::string>& header,
                    const std::unordered_map<std::string_view, std::size_t>& gwas_pos,
                    std::size_t& matched_rows) -> std::vector<RawGene>
{
    const std::size_t gene_col = require_column(reader, header, "gene_id");
    const std::size_t snp_col = require_column(reader, header, "snp_id");
    const std::size_t z_col = require_column(reader, header, "z");

    std::vector<RawGene> genes;
    std::unordered_map<std::string, std::size_t> gene_slot;
    std::unordered_set<std::string> pairs;
    while (auto row = reader.next())
    {
        if (row->size() != header.size())
        {
            throw DataError(reader.where("expected " + std::to_string(header.size()) +
                                         " fields, found " + std::to_string(row->size())));
        }
        const auto& gene = (*row)[gene_col];
        const auto& snp = (*row)[snp_col];
        const double z = parse_z(reader, (*row)[z_col]);
        if (!pairs.insert(gene + '\t' + snp).second)
        {
            throw DataError(reader.where("duplicate entry for gene '" + gene + "' and SNP '" +
                                         snp + "'"));
        }
        auto [slot, inserted] = gene_slot.try_emplace(gene, genes.size());
        if (inserted)
        {
            genes.push_back(RawGene{gene, {}});
        }
        const auto it = gwas_pos.find(snp);
        if (it != gwas_pos.end())
        {
            genes[slot->second].entries.emplace_back(it->second, z);
            ++matched_rows;
        }
    }
    return genes;
}

auto read_matrix_form(tsv::Reader& reader, const std::vector<std::string>& header,
                      const std::unordered_map<std::string_view, std::size_t>& gwas_pos,
                      std::size_t& matched_rows) -> std::vector<RawGene>
{
    std::vector<RawGene> genes;
    std::unordered_set<std::string_view> names;
    for (std::size_t c = 1; c < header.size(); ++c)
    {
        if (!names.insert(header[c]).second)
        {
            throw DataError(reader.where("duplicate gene column '" + header[c] + "'"));
        }
        genes.push_back(RawGene{header[c], {}});
    }
    if (genes.empty())
    {
        throw DataError(reader.where("matrix-form eQTL file has no gene columns"));
    }
    std::unordered_set<std::string> seen;
    while (auto row = reader.next())
    {
        if (row->size() != header.size())
        {
            throw DataError(reader.where("expected " + std::to_string(header.size()) +
                                         " fields, found " + std::to_string(row->size())));
        }
        const auto& snp = (*row)[0];
        if (!seen.insert(snp).second)
        {
            throw DataError(reader.where("duplicate SNP id '" + snp + "'"));
        }
        const auto it = gwas_pos.find(snp);
        for (std::size_t c = 1; c < row->size(); ++c)
        {
            const auto& cell = (*row)[c];
            if (cell == "NA")
            {
                continue;
            }
            const double z = parse_z(reader, cell);
            if (it != gwas_pos.end())
            {
                genes[c - 1].entries.emplace_back(it->second, z);
                ++matched_rows;
            }
        }
    }
    return genes;
}

}  // namespace

auto read_eqtl(std::istream& in, const std::string& source, const GwasPanel& gwas,
               const LoadOptions& options, std::size_t* dropped) -> EqtlPanel
{
    tsv::Reader reader(in, source);
    const auto header = reader.next();
    if (!header)
    {
        throw DataError(source + ": empty eQTL file");
    }

    std::unordered_map<std::string_view, std::size_t> gwas_pos;
    gwas_pos.reserve(gwas.size());
    for (std::size_t i = 0; i < gwas.size(); ++i)
    {
        gwas_pos.emplace(gwas.snp_ids[i], i);
    }

    std::size_t matched_rows = 0;
    std::vector<RawGene> raw;
    if (tsv::find_column(*header, "gene_id"))
    {
        raw = read_long_form(reader, *header, gwas_pos, matched_rows);
    }
    else if (!header->empty() && (*header)[0] == "snp_id")
    {
        raw = read_matrix_form(reader, *header, gwas_pos, matched_rows);
    }
    else
    {
        throw DataError(source + ":1: header must contain gene_id (long form) or start with "
                                 "snp_id (matrix form)");
    }
    if (matched_rows == 0)
    {
        throw DataError(source + ": no SNPs shared with the GWAS panel");
    }

    EqtlPanel panel;
    std::size_t drop_count = 0;
    for (auto& gene : raw)
    {
        if (gene.entries.size() < options.min_snps)
        {
            ++drop_count;
            continue;
        }
        std::sort(gene.entries.begin(), gene.entries.end());
        GeneEqtl out{std::move(gene.gene_id), {}, {}};
        out.gwas_index.reserve(gene.entries.size());
        out.z.reserve(gene.entries.size());
        for (const auto& [pos, z] : gene.entries)
        {
            out.gwas_index.push_back(pos);
            out.z.push_back(z);
        }
        panel.genes.push_back(std::move(out));
    }
    if (dropped != nullptr)
    {
        *dropped = drop_count;
    }
    if (panel.genes.empty())
    {
        throw DataError(source + ": no gene has at least " + std::to_string(options.min_snps) +
                        " SNPs shared with the GWAS panel");
    }
    return panel;
}

namespace
{

// Restricts the GWAS panel to SNPs used by at least one gene and remaps the
// gene indices accordingly.
void intersect(GwasPanel& gwas, EqtlPanel& eqtl)
{
    std::vector<char> used(gwas.size(), 0);
    for (const auto& gene : eqtl.genes)
    {
        for (const auto i : gene.gwas_index)
        {
            used[i] = 1;
        }
    }
    std::vector<std::size_t> remap(gwas.size(), std::numeric_limits<std::size_t>::max());
    GwasPanel kept;
    for (std::size_t i = 0; i < gwas.size(); ++i)
    {
        if (used[i] == 0)
        {
            continue;
        }
        remap[i] = kept.z.size();
        kept.snp_ids.push_back(std::move(gwas.snp_ids[i]));
        kept.z.push_back(gwas.z[i]);
        if (gwas.has_chrom())
        {
            kept.chrom.push_back(std::move(gwas.chrom[i]));
        }
    }
    for (auto& gene : eqtl.genes)
    {
        for (auto& i : gene.gwas_index)
        {
            i = remap[i];
        }
    }
    gwas = std::move(kept);
}

}  // namespace

auto load_panels(const std::string& gwas_path, const std::string& eqtl_path,
                 const LoadOptions& options) -> LoadedPanels
{
    std::ifstream gwas_in(gwas_path);
    if (!gwas_in)
    {
        throw DataError("cannot open GWAS file '" + gwas_path + "'");
    }
    std::ifstream eqtl_in(eqtl_path);
    if (!eqtl_in)
    {
        throw DataError("cannot open eQTL file '" + eqtl_path + "'");
    }
    LoadedPanels out;
    out.gwas = read_gwas(gwas_in, gwas_path);
    out.eqtl = read_eqtl(eqtl_in, eqtl_path, out.gwas, options, &out.dropped_genes);
    intersect(out.gwas, out.eqtl);
    return out;
}

auto l2_norm_estimate(std::span<const double> z) -> double
{
    if (z.size() < 2)
    {
        throw std::invalid_argument("l2_norm_estimate: need at least 2 z-scores");
    }
    const double excess =
        deterministic_sum(z.size(), [&](std::size_t i) { return z[i] * z[i]; }) -
        static_cast<double>(z.size());
    return excess > 0.0 ? std::sqrt(excess) : 0.0;
}

auto gene_seed(std::uint64_t seed, std::string_view gene_id) noexcept -> std::uint64_t
{
    return derive_key(seed, stable_hash(gene_id));
}

auto gene_panels(const GwasPanel& gwas, const GeneEqtl& gene) -> std::pair<ZPanel, ZPanel>
{
    std::vector<std::string> ids;
    std::vector<double> y;
    ids.reserve(gene.gwas_index.size());
    y.reserve(gene.gwas_index.size());
    for (const auto i : gene.gwas_index)
    {
        ids.push_back(gwas.snp_ids[i]);
        y.push_back(gwas.z[i]);
    }
    ZPanel x(gene.z, ids);
    return {std::move(x), ZPanel(std::move(y), std::move(ids))};
}

auto score_genes(const GwasPanel& gwas, const EqtlPanel& eqtl, const ScoreOptions& options)
    -> std::vector<GeneScore>
{
    std::vector<GeneScore> scores(eqtl.genes.size());
    parallel_for(eqtl.genes.size(), options.threads, [&](std::size_t g) {
        const auto& gene = eqtl.genes[g];
        const auto [x, y] = gene_panels(gwas, gene);
        const ApproxConfig cfg(x.size(), options.K);
        auto& out = scores[g];
        out.gene_id = gene.gene_id;
        out.t_hat =
            estimate_tscore(x, y, options.kind, cfg, gene_seed(options.seed, gene.gene_id)).value;
        out.theta_norm = l2_norm_estimate(x.z());
        out.mu_norm = l2_norm_estimate(y.z());
        if (out.theta_norm > 0.0 && out.mu_norm > 0.0)
        {
            out.normalized = out.t_hat / (out.theta_norm * out.mu_norm);
            out.status = ScoreStatus::Defined;
        }
        else
        {
            out.normalized = std::numeric_limits<double>::quiet_NaN();
            out.status = ScoreStatus::Undefined;
        }
    });

    std::sort(scores.begin(), scores.end(), [](const GeneScore& a, const GeneScore& b) {
        const bool da = a.status == ScoreStatus::Defined;
        const bool db = b.status == ScoreStatus::Defined;
        if (da != db)
        {
            return da;
        }
        if (da && a.normalized != b.normalized)
        {
            return a.normalized > b.normalized;
        }
        return a.gene_id < b.gene_id;
    });

    std::size_t rank = 0;
    for (std::size_t i = 0; i < scores.size(); ++i)
    {
        const bool new_group =
            i == 0 || scores[i].status != scores[i - 1].status ||
            (scores[i].status == ScoreStatus::Defined &&
             scores[i].normalized != scores[i - 1].normalized);
        if (new_group)
        {
            ++rank;
        }
        scores[i].rank = rank;
    }
    return scores;
}

void write_scores(std::ostream& out, const std::vector<GeneScore>& scores)
{
    out << "gene_id\tt_hat\ttheta_norm\tmu_norm\tnormalized\trank\tstatus\n";
    for (const auto& s : scores)
    {
        out << s.gene_id << '\t' << tsv::format_double(s.t_hat) << '\t'
            << tsv::format_double(s.theta_norm) << '\t' << tsv::format_double(s.mu_norm) << '\t'
            << tsv::format_double(s.normalized) << '\t' << s.rank << '\t'
            << (s.status == ScoreStatus::Defined ? "defined" : "undefined") << '\n';
    }
}

auto permute_random(const GwasPanel& gwas, Engine& rng) -> GwasPanel
{
    GwasPanel out = gwas;
    std::shuffle(out.z.begin(), out.z.end(), rng);
    return out;
}

namespace
{

// Positions of each chromosome in order of first appearance.
auto chromosome_groups(const GwasPanel& gwas) -> std::vector<std::vector<std::size_t>>
{
    if (!gwas.has_chrom())
    {
        throw DataError("cyclic permutation needs chromosome labels (chrom column)");
    }
    std::vector<std::vector<std::size_t>> groups;
    std::unordered_map<std::string_view, std::size_t> slot;
    for (std::size_t i = 0; i < gwas.size(); ++i)
    {
        auto [it, inserted] = slot.try_emplace(gwas.chrom[i], groups.size());
        if (inserted)
        {
            groups.emplace_back();
        }
        groups[it->second].push_back(i);
    }
    return groups;
}

auto rotate_groups(const GwasPanel& gwas, const std::vector<std::vector<std::size_t>>& groups,
                   std::span<const std::size_t> offsets) -> GwasPanel
{
    GwasPanel out = gwas;
    for (std::size_t c = 0; c < groups.size(); ++c)
    {
        const auto& pos = groups[c];
        const std::size_t len = pos.size();
        const std::size_t offset = offsets[c] % len;
        for (std::size_t i = 0; i < len; ++i)
        {
            out.z[pos[i]] = gwas.z[pos[(i + offset) % len]];
        }
    }
    return out;
}

}  // namespace

auto rotate_chromosomes(const GwasPanel& gwas, std::span<const std::size_t> offsets)
    -> GwasPanel
{
    const auto groups = chromosome_groups(gwas);
    if (offsets.size() != groups.size())
    {
        throw std::invalid_argument("rotate_chromosomes: need one offset per chromosome");
    }
    return rotate_groups(gwas, groups, offsets);
}

auto permute_cyclic(const GwasPanel& gwas, Engine& rng) -> GwasPanel
{
    const auto groups = chromosome_groups(gwas);
    std::vector<std::size_t> offsets(groups.size());
    for (std::size_t c = 0; c < groups.size(); ++c)
    {
        std::uniform_int_distribution<std::size_t> dist(0, groups[c].size() - 1);
        offsets[c] = dist(rng);
    }
    return rotate_groups(gwas, groups, offsets);
}

auto null_distribution(const GwasPanel& gwas, const EqtlPanel& eqtl, PermutationMode mode,
                       std::size_t reps, const ScoreOptions& options) -> NullDistribution
{
    if (reps == 0)
    {
        throw std::invalid_argument("null_distribution: reps must be at least 1");
    }
    if (mode == PermutationMode::Cyclic && !gwas.has_chrom())
    {
        throw DataError("cyclic permutation needs chromosome labels (chrom column)");
    }

    NullDistribution out;
    out.mode = mode;
    out.reps = reps;
    std::unordered_map<std::string_view, std::size_t> slot;
    for (const auto& gene : eqtl.genes)
    {
        slot.emplace(gene.gene_id, out.gene_ids.size());
        out.gene_ids.push_back(gene.gene_id);
    }
    out.scores.assign(out.gene_ids.size(), std::vector<double>(reps));

    parallel_for(reps, options.threads, [&](std::size_t r) {
        const std::uint64_t rep_key = derive_key(options.seed, r);
        Engine rng = make_engine(rep_key);
        const GwasPanel permuted =
            mode == PermutationMode::Random ? permute_random(gwas, rng) : permute_cyclic(gwas, rng);
        ScoreOptions inner = options;
        inner.seed = derive_key(rep_key, 1);
        inner.threads = 1;
        for (const auto& s : score_genes(permuted, eqtl, inner))
        {
            out.scores[slot.at(s.gene_id)][r] = s.normalized;
        }
    });
    return out;
}

void write_null(std::ostream& out, const NullDistribution& null)
{
    out << "gene_id\trep\tnormalized\n";
    for (std::size_t g = 0; g < null.gene_ids.size(); ++g)
    {
        for (std::size_t r = 0; r < null.reps; ++r)
        {
            out << null.gene_ids[g] << '\t' << r << '\t' << tsv::format_double(null.scores[g][r])
                << '\n';
        }
    }
}

void write_ranked_null(std::ostream& out, const NullDistribution& null)
{
    out << "rank\trep\tnormalized\n";
    for (std::size_t r = 0; r < null.reps; ++r)
    {
        std::vector<double> column;
        column.reserve(null.gene_ids.size());
        for (const auto& per_gene : null.scores)
        {
            if (!std::isnan(per_gene[r]))
            {
                column.push_back(per_gene[r]);
            }
        }
        std::sort(column.begin(), column.end(), std::greater<>());
        for (std::size_t i = 0; i < column.size(); ++i)
        {
            out << (i + 1) << '\t' << r << '\t' << tsv::format_double(column[i]) << '\n';
        }
    }
}

}  // namespace tscore
