#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "cli.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"
#include "tscore/gsea.hpp"

using namespace tscore;
using testing::TempDir;

namespace
{

struct Result
{
    int code;
    std::string out;
    std::string err;
};

auto invoke(std::vector<std::string> args) -> Result
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

// Drops comment lines whose key is in `keys`.
auto strip(const std::string& text, std::vector<std::string> keys = {"timestamp"})
    -> std::string
{
    std::istringstream in(text);
    std::string line;
    std::string out;
    while (std::getline(in, line))
    {
        bool drop = false;
        for (const auto& k : keys)
        {
            drop = drop || line.rfind("# " + k + "=", 0) == 0;
        }
        if (!drop)
        {
            out += line + '\n';
        }
    }
    return out;
}

auto body(const std::string& text) -> std::string
{
    std::istringstream in(text);
    std::string line;
    std::string out;
    while (std::getline(in, line))
    {
        if (line.empty() || line[0] != '#')
        {
            out += line + '\n';
        }
    }
    return out;
}

struct Files
{
    TempDir dir;
    std::string gwas;
    std::string eqtl;
    testing::PlantedFixture fixture;
};

auto fixture_files(std::uint64_t n = 2000, std::size_t genes = 6) -> std::unique_ptr<Files>
{
    auto f = std::make_unique<Files>();
    f->fixture = testing::make_planted_fixture(n, genes, 31);
    std::ostringstream g;
    std::ostringstream e;
    testing::write_gwas_tsv(g, f->fixture.gwas);
    testing::write_eqtl_long(e, f->fixture.eqtl, f->fixture.gwas);
    f->gwas = f->dir.write("gwas.tsv", g.str());
    f->eqtl = f->dir.write("eqtl.tsv", e.str());
    return f;
}

}  // namespace

TEST_CASE("usage errors exit with 2 and one diagnostic line")
{
    for (const auto& args : std::vector<std::vector<std::string>>{
             {},
             {"frobnicate"},
             {"simulate", "--bogus"},
             {"simulate", "--reps", "abc"},
             {"simulate", "--cov", "ar1"},
             {"simulate", "--estimators", "best"},
             {"simulate", "--n", "1005", "--s", "100"},
             {"rank", "--gwas", "g.tsv"},
             {"permute", "--gwas", "g", "--eqtl", "e", "--mode", "sideways"},
             {"rank", "--gwas", "g", "--eqtl", "e", "--k", "99"}})
    {
        CAPTURE(args.size());
        const auto r = invoke(args);
        CHECK(r.code == cli::kExitUsageError);
        CHECK(r.err.rfind("tscore: ", 0) == 0);
        CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
        CHECK(r.out.empty());
    }
}

TEST_CASE("help exits cleanly")
{
    const auto r = invoke({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("simulate") != std::string::npos);
    CHECK(invoke({"rank", "--help"}).code == 0);
}

TEST_CASE("data errors exit with 1")
{
    TempDir dir;
    const auto bad = dir.write("bad.tsv", "snp_id\tz\na\t1\nb\n");
    const auto good = dir.write("good.tsv", "snp_id\tz\na\t1\nb\t2\n");
    auto r = invoke({"rank", "--gwas", bad, "--eqtl", good});
    CHECK(r.code == cli::kExitDataError);
    CHECK(r.err.find("bad.tsv:3:") != std::string::npos);
    r = invoke({"rank", "--gwas", dir.file("missing.tsv"), "--eqtl", good});
    CHECK(r.code == cli::kExitDataError);
    r = invoke({"estimate", "--x", good, "--y", dir.write("y.tsv", "snp_id\tz\nq\t1\n")});
    CHECK(r.code == cli::kExitDataError);
    CHECK(r.err.find("share no SNP") != std::string::npos);
}

TEST_CASE("simulate output is reproducible and thread-independent")
{
    const std::vector<std::string> args{"simulate", "--n", "2000", "--s", "100,200",
                                        "--cov",    "identity,toeplitz10", "--reps", "6",
                                        "--seed",   "5", "--threads", "1"};
    const auto a = invoke(args);
    const auto b = invoke(args);
    REQUIRE(a.code == 0);
    CHECK(strip(a.out) == strip(b.out));
    CHECK(a.out.rfind("# tscore simulate\n# version=", 0) == 0);
    CHECK(a.out.find("# seed=5\n") != std::string::npos);
    CHECK(a.out.find("# timestamp=") != std::string::npos);
    CHECK(body(a.out).rfind("n\ts\tcov\testimator\trmse\n", 0) == 0);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') - 15 == 1 + 2 * 2 * 5);

    auto threaded = args;
    threaded.back() = "4";
    const auto c = invoke(threaded);
    CHECK(c.out.find("# threads=4\n") != std::string::npos);
    CHECK(strip(a.out, {"timestamp", "threads"}) == strip(c.out, {"timestamp", "threads"}));

    ::setenv("TSCORE_THREADS", "3", 1);
    const auto d = invoke(args);
    ::unsetenv("TSCORE_THREADS");
    CHECK(d.out.find("# threads=3\n") != std::string::npos);
    CHECK(body(d.out) == body(a.out));
    ::setenv("TSCORE_THREADS", "many", 1);
    CHECK(invoke(args).code == cli::kExitUsageError);
    ::unsetenv("TSCORE_THREADS");
}

TEST_CASE("--out writes the same bytes as stdout")
{
    TempDir dir;
    const auto path = dir.file("rmse.tsv");
    const std::vector<std::string> base{"simulate", "--n", "1000", "--s", "100", "--reps", "3"};
    const auto to_stdout = invoke(base);
    auto with_out = base;
    with_out.insert(with_out.end(), {"--out", path});
    const auto r = invoke(with_out);
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(strip(testing::read_file(path)) == strip(to_stdout.out));
}

TEST_CASE("estimate aligns by SNP id")
{
    TempDir dir;
    const auto x = dir.write("x.tsv", "snp_id\tz\na\t7\nb\t0\nc\t1\n");
    const auto y = dir.write("y.tsv", "z\tsnp_id\n0\tb\n8\ta\n");
    const auto r = invoke({"estimate", "--x", x, "--y", y, "--estimator", "naive,hybrid-thresh-nosplit",
                           "--k", "1"});
    REQUIRE(r.code == 0);
    const auto text = body(r.out);
    CHECK(text.rfind("estimator\tt_hat\tn\tk\nnaive\t56\t2\t1\nhybrid-thresh-nosplit\t56.01624172990", 0) ==
          0);
}

TEST_CASE("rank output matches in-process scoring and feeds gsea bit-for-bit")
{
    const auto f = fixture_files();
    const std::string scores_path = f->dir.file("scores.tsv");
    const auto r = invoke({"rank", "--gwas", f->gwas, "--eqtl", f->eqtl, "--seed", "9", "--out",
                           scores_path});
    REQUIRE(r.code == 0);

    ScoreOptions opt;
    opt.seed = 9;
    const auto in_process = score_genes(f->fixture.gwas, f->fixture.eqtl, opt);
    std::ostringstream expected;
    write_scores(expected, in_process);
    CHECK(body(testing::read_file(scores_path)) == expected.str());

    ScoreMap map;
    std::string gmt;
    std::vector<std::string> members;
    for (const auto& s : in_process)
    {
        if (s.status == ScoreStatus::Defined)
        {
            map.emplace(s.gene_id, s.normalized);
        }
        members.push_back(s.gene_id);
    }
    gmt = "SET1\tfirst\t" + members[0] + "\t" + members[1] + "\t" + members[2] + "\n" +
          "SET2\tsecond\t" + members[3] + "\t" + members[4] + "\n";
    const auto gmt_path = f->dir.write("sets.gmt", gmt);
    const auto g = invoke({"gsea", "--scores", scores_path, "--gmt", gmt_path, "--min-size", "2",
                           "--perm", "99", "--seed", "4"});
    REQUIRE(g.code == 0);
    std::istringstream gmt_in(gmt);
    GseaOptions gopt;
    gopt.min_size = 2;
    gopt.perm_reps = 99;
    gopt.seed = 4;
    std::ostringstream gexpected;
    write_gsea(gexpected, run_gsea(map, read_gmt(gmt_in, "sets.gmt"), gopt));
    CHECK(body(g.out) == gexpected.str());
}

TEST_CASE("permute views and modes")
{
    const auto f = fixture_files(2000, 3);
    const auto raw = invoke({"permute", "--gwas", f->gwas, "--eqtl", f->eqtl, "--min-snps", "100",
                             "--reps", "4", "--mode", "cyclic"});
    REQUIRE(raw.code == 0);
    CHECK(raw.out.find("# mode=cyclic\n") != std::string::npos);
    const auto raw_body = body(raw.out);
    CHECK(raw_body.rfind("gene_id\trep\tnormalized\n", 0) == 0);
    CHECK(std::count(raw_body.begin(), raw_body.end(), '\n') == 1 + 4 * 4);
    const auto ranked = invoke({"permute", "--gwas", f->gwas, "--eqtl", f->eqtl, "--reps", "4",
                                "--view", "ranked"});
    REQUIRE(ranked.code == 0);
    CHECK(body(ranked.out).rfind("rank\trep\tnormalized\n", 0) == 0);
    const auto again = invoke({"permute", "--gwas", f->gwas, "--eqtl", f->eqtl, "--reps", "4",
                               "--view", "ranked"});
    CHECK(strip(again.out) == strip(ranked.out));

    std::ostringstream no_chrom;
    GwasPanel g = f->fixture.gwas;
    g.chrom.clear();
    testing::write_gwas_tsv(no_chrom, g);
    const auto plain = f->dir.write("plain.tsv", no_chrom.str());
    const auto r = invoke({"permute", "--gwas", plain, "--eqtl", f->eqtl, "--mode", "cyclic"});
    CHECK(r.code == cli::kExitDataError);
    CHECK(r.err.find("chrom") != std::string::npos);
}

TEST_CASE("rank warns about dropped genes")
{
    TempDir dir;
    const auto gwas = dir.write("g.tsv", "snp_id\tz\na\t1\nb\t2\nc\t3\n");
    const auto eqtl = dir.write("e.tsv",
                                "gene_id\tsnp_id\tz\ng1\ta\t1\ng1\tb\t2\ng1\tc\t1\ng2\ta\t5\n");
    const auto r = invoke({"rank", "--gwas", gwas, "--eqtl", eqtl, "--min-snps", "3"});
    CHECK(r.code == 0);
    CHECK(r.err.find("dropped 1 gene") != std::string::npos);
    CHECK(r.out.find("# dropped_genes=1\n") != std::string::npos);
}
