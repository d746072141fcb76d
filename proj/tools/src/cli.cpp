#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "tscore/error.hpp"
#include "tscore/estimators.hpp"
#include "tscore/genomics.hpp"
#include "tscore/gsea.hpp"
#include "tscore/parallel.hpp"
#include "tscore/simulation.hpp"
#include "tscore/tsv.hpp"

namespace tscore::cli
{
namespace
{

class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct Common
{
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out_path;
};

auto effective_threads(unsigned flag) -> unsigned
{
    const char* env = std::getenv("TSCORE_THREADS");
    if (env == nullptr || *env == '\0')
    {
        return resolve_threads(flag);
    }
    const std::string_view text(env);
    unsigned value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size())
    {
        throw UsageError("TSCORE_THREADS must be a nonnegative integer, got '" +
                         std::string(text) + "'");
    }
    return resolve_threads(value);
}

auto utc_timestamp() -> std::string
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

auto join(const std::vector<std::string>& parts) -> std::string
{
    std::string out;
    for (const auto& p : parts)
    {
        if (!out.empty())
        {
            out += ',';
        }
        out += p;
    }
    return out;
}

template <typename T>
auto join_numbers(const std::vector<T>& values) -> std::string
{
    std::vector<std::string> parts;
    parts.reserve(values.size());
    for (const auto v : values)
    {
        parts.push_back(std::to_string(v));
    }
    return join(parts);
}

auto parse_estimators(const std::vector<std::string>& names) -> std::vector<EstimatorKind>
{
    std::vector<EstimatorKind> kinds;
    for (const auto& name : names)
    {
        if (name == "all")
        {
            kinds.assign(kAllEstimators.begin(), kAllEstimators.end());
            continue;
        }
        const auto kind = parse_estimator(name);
        if (!kind)
        {
            throw UsageError("unknown estimator '" + name +
                             "' (expected hybrid-thresh, hybrid-thresh-nosplit, simple-thresh, "
                             "hybrid-nothresh, naive or all)");
        }
        if (std::find(kinds.begin(), kinds.end(), *kind) == kinds.end())
        {
            kinds.push_back(*kind);
        }
    }
    if (kinds.empty())
    {
        throw UsageError("no estimator given");
    }
    return kinds;
}

auto single_estimator(const std::string& name) -> EstimatorKind
{
    const auto kinds = parse_estimators({name});
    if (kinds.size() != 1)
    {
        throw UsageError("--estimator takes a single estimator here");
    }
    return kinds.front();
}

auto estimator_names(const std::vector<EstimatorKind>& kinds) -> std::string
{
    std::vector<std::string> names;
    for (const auto k : kinds)
    {
        names.emplace_back(to_string(k));
    }
    return join(names);
}

auto open_input(const std::string& path, std::string_view what) -> std::ifstream
{
    std::ifstream in(path);
    if (!in)
    {
        throw DataError("cannot open " + std::string(what) + " file '" + path + "'");
    }
    return in;
}

// Writes the comment header and the table body to --out or the default
// stream. The table is built in memory first so a failed run leaves no
// partial file behind.
void emit(const Common& common, std::string_view command, tsv::Comments config,
          const std::string& body, std::ostream& out)
{
    std::ostringstream text;
    text << "# tscore " << command << '\n';
    config.insert(config.begin(), {"version", TSCORE_VERSION});
    tsv::write_comments(text, config);
    text << "# timestamp=" << utc_timestamp() << '\n';
    text << body;
    if (common.out_path.empty())
    {
        out << text.str();
        out.flush();
        return;
    }
    std::ofstream file(common.out_path, std::ios::binary);
    if (!file || !(file << text.str()) || !file.flush())
    {
        throw DataError("cannot write output file '" + common.out_path + "'");
    }
}

// ---- simulate ----------------------------------------------------------

struct SimulateArgs
{
    std::vector<std::uint64_t> n{150000};
    std::vector<std::uint64_t> s{100};
    std::vector<std::string> cov{"identity"};
    std::uint64_t reps = 100;
    int k = kDefaultHalfDegree;
    std::vector<std::string> estimators{"all"};
    std::uint64_t block_len = 10;
    double peak_low = 3.0;
    double peak_high = 5.0;
    bool independent_support = false;
};

void run_simulate(const Common& common, const SimulateArgs& a, std::ostream& out)
{
    std::vector<CovKind> covs;
    for (const auto& name : a.cov)
    {
        const auto c = parse_cov(name);
        if (!c)
        {
            throw UsageError("unknown covariance '" + name +
                             "' (expected identity, toeplitz10 or exchangeable1000)");
        }
        covs.push_back(*c);
    }
    const auto kinds = parse_estimators(a.estimators);
    const unsigned threads = effective_threads(common.threads);

    RmseTable table;
    for (const auto n : a.n)
    {
        for (const auto s : a.s)
        {
            for (const auto cov : covs)
            {
                SimStudySpec spec;
                spec.signal.n = n;
                spec.signal.s = s;
                spec.signal.block_len = a.block_len;
                spec.signal.peak_low = a.peak_low;
                spec.signal.peak_high = a.peak_high;
                spec.signal.shared_support = !a.independent_support;
                spec.signal.seed = common.seed;
                spec.cov = cov;
                spec.reps = a.reps;
                spec.estimators = kinds;
                spec.K = a.k;
                try
                {
                    spec.validate();
                }
                catch (const std::invalid_argument& e)
                {
                    throw UsageError(e.what());
                }
                table.merge(run_study(spec, threads));
            }
        }
    }
    std::ostringstream body;
    table.write_tsv(body);
    emit(common, "simulate",
         {{"seed", std::to_string(common.seed)},
          {"threads", std::to_string(threads)},
          {"n", join_numbers(a.n)},
          {"s", join_numbers(a.s)},
          {"cov", join(a.cov)},
          {"reps", std::to_string(a.reps)},
          {"k", std::to_string(a.k)},
          {"estimators", estimator_names(kinds)},
          {"block_len", std::to_string(a.block_len)},
          {"peak_low", tsv::format_double(a.peak_low)},
          {"peak_high", tsv::format_double(a.peak_high)},
          {"shared_support", a.independent_support ? "false" : "true"}},
         body.str(), out);
}

// ---- estimate ----------------------------------------------------------

struct EstimateArgs
{
    std::string x_path;
    std::string y_path;
    std::vector<std::string> estimators{"hybrid-thresh-nosplit"};
    int k = kDefaultHalfDegree;
};

struct ZFile
{
    std::vector<std::string> ids;  // empty without a snp_id column
    std::vector<double> z;
};

auto read_z_file(const std::string& path) -> ZFile
{
    auto in = open_input(path, "z-score");
    tsv::Reader reader(in, path);
    const auto header = reader.next();
    if (!header)
    {
        throw DataError(path + ": empty z-score file");
    }
    const auto z_col = tsv::find_column(*header, "z");
    if (!z_col)
    {
        throw DataError(reader.where("missing column 'z'"));
    }
    const auto id_col = tsv::find_column(*header, "snp_id");
    ZFile f;
    std::unordered_set<std::string> seen;
    while (auto row = reader.next())
    {
        if (row->size() != header->size())
        {
            throw DataError(reader.where("expected " + std::to_string(header->size()) +
                                         " fields, found " + std::to_string(row->size())));
        }
        const auto v = tsv::parse_double((*row)[*z_col]);
        if (!v)
        {
            throw DataError(reader.where("malformed z-score '" + (*row)[*z_col] + "'"));
        }
        f.z.push_back(*v);
        if (id_col)
        {
            if (!seen.insert((*row)[*id_col]).second)
            {
                throw DataError(reader.where("duplicate SNP id '" + (*row)[*id_col] + "'"));
            }
            f.ids.push_back(std::move((*row)[*id_col]));
        }
    }
    return f;
}

// Aligns y to x by SNP id when both files carry ids, else by position.
auto align(ZFile x, ZFile y) -> std::pair<ZPanel, ZPanel>
{
    if (x.ids.empty() || y.ids.empty())
    {
        if (x.z.size() != y.z.size())
        {
            throw DataError("z-score files have " + std::to_string(x.z.size()) + " and " +
                            std::to_string(y.z.size()) +
                            " rows; without snp_id columns they must match");
        }
        return {ZPanel(std::move(x.z)), ZPanel(std::move(y.z))};
    }
    std::unordered_map<std::string_view, std::size_t> y_pos;
    for (std::size_t i = 0; i < y.ids.size(); ++i)
    {
        y_pos.emplace(y.ids[i], i);
    }
    std::vector<std::string> ids;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < x.ids.size(); ++i)
    {
        const auto it = y_pos.find(x.ids[i]);
        if (it != y_pos.end())
        {
            ids.push_back(x.ids[i]);
            xs.push_back(x.z[i]);
            ys.push_back(y.z[it->second]);
        }
    }
    if (ids.empty())
    {
        throw DataError("z-score files share no SNP ids");
    }
    return {ZPanel(std::move(xs), ids), ZPanel(std::move(ys), ids)};
}

void run_estimate(const Common& common, const EstimateArgs& a, std::ostream& out)
{
    const auto kinds = parse_estimators(a.estimators);
    const unsigned threads = effective_threads(common.threads);
    auto [x, y] = align(read_z_file(a.x_path), read_z_file(a.y_path));
    if (x.size() < 2)
    {
        throw DataError("need at least 2 aligned z-scores, found " + std::to_string(x.size()));
    }
    const ApproxConfig cfg(x.size(), a.k);
    std::ostringstream body;
    body << "estimator\tt_hat\tn\tk\n";
    for (const auto kind : kinds)
    {
        const auto e = estimate_tscore(x, y, kind, cfg, common.seed, threads);
        body << to_string(kind) << '\t' << tsv::format_double(e.value) << '\t' << x.size() << '\t'
             << e.k_used << '\n';
    }
    emit(common, "estimate",
         {{"seed", std::to_string(common.seed)},
          {"threads", std::to_string(threads)},
          {"x", a.x_path},
          {"y", a.y_path},
          {"estimators", estimator_names(kinds)},
          {"k", std::to_string(a.k)},
          {"scale", tsv::format_double(cfg.scale())},
          {"ceiling", tsv::format_double(cfg.ceiling())}},
         body.str(), out);
}

// ---- rank / permute ----------------------------------------------------

struct PanelArgs
{
    std::string gwas_path;
    std::string eqtl_path;
    std::string estimator = "hybrid-thresh-nosplit";
    int k = kDefaultHalfDegree;
    std::size_t min_snps = 100;
};

auto load(const PanelArgs& a, std::ostream& err) -> LoadedPanels
{
    auto panels = load_panels(a.gwas_path, a.eqtl_path, LoadOptions{a.min_snps});
    if (panels.dropped_genes > 0)
    {
        err << "tscore: warning: dropped " << panels.dropped_genes << " gene(s) with fewer than "
            << a.min_snps << " matched SNPs\n";
    }
    return panels;
}

auto panel_config(const Common& common, unsigned threads, const PanelArgs& a,
                  const LoadedPanels& p) -> tsv::Comments
{
    return {{"seed", std::to_string(common.seed)},
            {"threads", std::to_string(threads)},
            {"gwas", a.gwas_path},
            {"eqtl", a.eqtl_path},
            {"estimator", a.estimator},
            {"k", std::to_string(a.k)},
            {"min_snps", std::to_string(a.min_snps)},
            {"snps", std::to_string(p.gwas.size())},
            {"genes", std::to_string(p.eqtl.genes.size())},
            {"dropped_genes", std::to_string(p.dropped_genes)}};
}

auto score_options(const Common& common, unsigned threads, const PanelArgs& a) -> ScoreOptions
{
    if (a.k < 1 || a.k > kMaxHalfDegree)
    {
        throw UsageError("--k must be in [1, " + std::to_string(kMaxHalfDegree) + "]");
    }
    if (a.min_snps < 2)
    {
        throw UsageError("--min-snps must be at least 2");
    }
    ScoreOptions opt;
    opt.kind = single_estimator(a.estimator);
    opt.K = a.k;
    opt.seed = common.seed;
    opt.threads = threads;
    return opt;
}

void run_rank(const Common& common, const PanelArgs& a, std::ostream& out, std::ostream& err)
{
    const unsigned threads = effective_threads(common.threads);
    const auto opt = score_options(common, threads, a);
    const auto panels = load(a, err);
    std::ostringstream body;
    write_scores(body, score_genes(panels.gwas, panels.eqtl, opt));
    emit(common, "rank", panel_config(common, threads, a, panels), body.str(), out);
}

struct PermuteArgs
{
    PanelArgs panel;
    std::string mode = "random";
    std::size_t reps = 50;
    std::string view = "raw";
};

void run_permute(const Common& common, const PermuteArgs& a, std::ostream& out,
                 std::ostream& err)
{
    const unsigned threads = effective_threads(common.threads);
    const auto opt = score_options(common, threads, a.panel);
    const PermutationMode mode =
        a.mode == "cyclic" ? PermutationMode::Cyclic : PermutationMode::Random;
    const auto panels = load(a.panel, err);
    const auto null = null_distribution(panels.gwas, panels.eqtl, mode, a.reps, opt);
    std::ostringstream body;
    if (a.view == "ranked")
    {
        write_ranked_null(body, null);
    }
    else
    {
        write_null(body, null);
    }
    auto config = panel_config(common, threads, a.panel, panels);
    config.emplace_back("mode", a.mode);
    config.emplace_back("reps", std::to_string(a.reps));
    config.emplace_back("view", a.view);
    emit(common, "permute", std::move(config), body.str(), out);
}

// ---- gsea --------------------------------------------------------------

struct GseaArgs
{
    std::string scores_path;
    std::string gmt_path;
    std::size_t min_size = 10;
    std::size_t perm = 999;
};

// Reads gene_id and normalized from a rank table; undefined scores are left
// out of the map.
auto read_scores(const std::string& path, std::size_t* skipped) -> ScoreMap
{
    auto in = open_input(path, "scores");
    tsv::Reader reader(in, path);
    const auto header = reader.next();
    if (!header)
    {
        throw DataError(path + ": empty scores file");
    }
    const auto gene_col = tsv::find_column(*header, "gene_id");
    const auto score_col = tsv::find_column(*header, "normalized");
    if (!gene_col || !score_col)
    {
        throw DataError(reader.where("scores file needs gene_id and normalized columns"));
    }
    ScoreMap scores;
    *skipped = 0;
    while (auto row = reader.next())
    {
        if (row->size() != header->size())
        {
            throw DataError(reader.where("expected " + std::to_string(header->size()) +
                                         " fields, found " + std::to_string(row->size())));
        }
        const auto v = tsv::parse_double((*row)[*score_col], true);
        if (!v || std::isinf(*v))
        {
            throw DataError(reader.where("malformed score '" + (*row)[*score_col] + "'"));
        }
        if (std::isnan(*v))
        {
            ++*skipped;
            continue;
        }
        if (!scores.emplace((*row)[*gene_col], *v).second)
        {
            throw DataError(reader.where("duplicate gene id '" + (*row)[*gene_col] + "'"));
        }
    }
    if (scores.empty())
    {
        throw DataError(path + ": no defined scores");
    }
    return scores;
}

void run_gsea_command(const Common& common, const GseaArgs& a, std::ostream& out)
{
    if (a.min_size < 1)
    {
        throw UsageError("--min-size must be at least 1");
    }
    const unsigned threads = effective_threads(common.threads);
    std::size_t skipped = 0;
    const auto scores = read_scores(a.scores_path, &skipped);
    auto gmt = open_input(a.gmt_path, "GMT");
    const auto sets = read_gmt(gmt, a.gmt_path);
    GseaOptions opt;
    opt.min_size = a.min_size;
    opt.perm_reps = a.perm;
    opt.seed = common.seed;
    opt.threads = threads;
    const auto results = run_gsea(scores, sets, opt);
    std::ostringstream body;
    write_gsea(body, results);
    emit(common, "gsea",
         {{"seed", std::to_string(common.seed)},
          {"threads", std::to_string(threads)},
          {"scores", a.scores_path},
          {"gmt", a.gmt_path},
          {"min_size", std::to_string(a.min_size)},
          {"perm", std::to_string(a.perm)},
          {"scored_genes", std::to_string(scores.size())},
          {"undefined_genes", std::to_string(skipped)},
          {"sets_read", std::to_string(sets.size())},
          {"sets_tested", std::to_string(results.size())}},
         body.str(), out);
}

void add_common(CLI::App& sub, Common& common)
{
    sub.add_option("--seed", common.seed, "RNG seed")->capture_default_str();
    sub.add_option("--threads", common.threads,
                   "Worker threads, 0 for all cores (TSCORE_THREADS overrides)")
        ->capture_default_str();
    sub.add_option("--out", common.out_path, "Output file (default: stdout)");
}

void add_panel_options(CLI::App& sub, PanelArgs& a)
{
    sub.add_option("--gwas", a.gwas_path, "GWAS TSV: snp_id, z, optional chrom")
        ->required();
    sub.add_option("--eqtl", a.eqtl_path, "eQTL TSV, long or matrix form")
        ->required();
    sub.add_option("--estimator", a.estimator, "Estimator name")->capture_default_str();
    sub.add_option("--k", a.k, "Half degree K of the polynomial approximation")
        ->capture_default_str();
    sub.add_option("--min-snps", a.min_snps, "Minimum matched SNPs per gene")
        ->capture_default_str();
}

}  // namespace

auto run(std::vector<std::string> args, std::ostream& out, std::ostream& err) -> int
{
    CLI::App app{"Estimate absolute inner products of sparse Gaussian mean vectors, "
                 "rank genes by GWAS/eQTL overlap and test gene sets",
                 "tscore"};
    app.set_version_flag("--version", TSCORE_VERSION);
    app.require_subcommand(1);

    Common common;

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo RMSE study of the estimators");
    add_common(*simulate, common);
    simulate->add_option("--n", sim.n, "Dimensions (comma list)")->delimiter(',')->capture_default_str();
    simulate->add_option("--s", sim.s, "Support sizes (comma list)")->delimiter(',')->capture_default_str();
    simulate->add_option("--cov", sim.cov, "identity, toeplitz10, exchangeable1000 (comma list)")
        ->delimiter(',')
        ->capture_default_str();
    simulate->add_option("--reps", sim.reps, "Replicates per cell")->capture_default_str();
    simulate->add_option("--k", sim.k, "Half degree K")->capture_default_str();
    simulate->add_option("--estimators", sim.estimators, "Estimator names or 'all' (comma list)")
        ->delimiter(',')
        ->capture_default_str();
    simulate->add_option("--block-len", sim.block_len, "Signal block length")->capture_default_str();
    simulate->add_option("--peak-low", sim.peak_low, "Lower bound of block peaks")->capture_default_str();
    simulate->add_option("--peak-high", sim.peak_high, "Upper bound of block peaks")->capture_default_str();
    simulate->add_flag("--independent-support", sim.independent_support,
                       "Draw the supports of theta and mu separately");

    EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate", "Estimate the T-score of two z-score files");
    add_common(*estimate, common);
    estimate->add_option("--x", est.x_path, "First z-score TSV (z, optional snp_id)")
        ->required();
    estimate->add_option("--y", est.y_path, "Second z-score TSV (z, optional snp_id)")
        ->required();
    estimate->add_option("--estimator", est.estimators, "Estimator names or 'all' (comma list)")
        ->delimiter(',')
        ->capture_default_str();
    estimate->add_option("--k", est.k, "Half degree K")->capture_default_str();

    PanelArgs rank_args;
    auto* rank = app.add_subcommand("rank", "Rank genes by normalized T-score");
    add_common(*rank, common);
    add_panel_options(*rank, rank_args);

    PermuteArgs perm;
    auto* permute = app.add_subcommand("permute", "Permutation null of normalized T-scores");
    add_common(*permute, common);
    add_panel_options(*permute, perm.panel);
    permute->add_option("--mode", perm.mode, "random or cyclic")
        ->check(CLI::IsMember({"random", "cyclic"}))
        ->capture_default_str();
    permute->add_option("--reps", perm.reps, "Permutations")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    permute->add_option("--view", perm.view, "raw (per gene) or ranked (per replicate)")
        ->check(CLI::IsMember({"raw", "ranked"}))
        ->capture_default_str();

    GseaArgs gs;
    auto* gsea = app.add_subcommand("gsea", "Kolmogorov-Smirnov gene-set enrichment");
    add_common(*gsea, common);
    gsea->add_option("--scores", gs.scores_path, "Scores TSV from 'rank'")
        ->required();
    gsea->add_option("--gmt", gs.gmt_path, "Gene sets in GMT format")
        ->required();
    gsea->add_option("--min-size", gs.min_size, "Minimum scored members per set")
        ->capture_default_str();
    gsea->add_option("--perm", gs.perm, "Label permutations per set")->capture_default_str();

    try
    {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e, out, err);
    }
    catch (const CLI::CallForAllHelp& e)
    {
        return app.exit(e, out, err);
    }
    catch (const CLI::CallForVersion& e)
    {
        return app.exit(e, out, err);
    }
    catch (const CLI::ParseError& e)
    {
        err << "tscore: " << e.what() << '\n';
        return kExitUsageError;
    }

    try
    {
        if (simulate->parsed())
        {
            run_simulate(common, sim, out);
        }
        else if (estimate->parsed())
        {
            run_estimate(common, est, out);
        }
        else if (rank->parsed())
        {
            run_rank(common, rank_args, out, err);
        }
        else if (permute->parsed())
        {
            run_permute(common, perm, out, err);
        }
        else
        {
            run_gsea_command(common, gs, out);
        }
    }
    catch (const UsageError& e)
    {
        err << "tscore: " << e.what() << '\n';
        return kExitUsageError;
    }
    catch (const DataError& e)
    {
        err << "tscore: " << e.what() << '\n';
        return kExitDataError;
    }
    catch (const std::invalid_argument& e)
    {
        err << "tscore: " << e.what() << '\n';
        return kExitUsageError;
    }
    catch (const std::exception& e)
    {
        err << "tscore: " << e.what() << '\n';
        return kExitDataError;
    }
    return kExitOk;
}

}  // namespace tscore::cli
