#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "tscore/error.hpp"
#include "tscore/gsea.hpp"

using namespace tscore;

namespace
{

auto named_scores(const std::vector<double>& values) -> ScoreMap
{
    ScoreMap m;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        m.emplace("g" + std::to_string(i), values[i]);
    }
    return m;
}

auto set_of(std::vector<std::string> members, std::string id = "S") -> GeneSet
{
    std::sort(members.begin(), members.end());
    return GeneSet{std::move(id), std::move(members), 0};
}

auto complement(const ScoreMap& scores, const GeneSet& set) -> GeneSet
{
    std::vector<std::string> out;
    for (const auto& [g, v] : scores)
    {
        if (!std::binary_search(set.members.begin(), set.members.end(), g))
        {
            out.push_back(g);
        }
    }
    return set_of(std::move(out), "Sc");
}

// sup over a dense grid of t spanning the pooled range.
auto brute_force_ks(const ScoreMap& scores, const GeneSet& set) -> double
{
    std::vector<double> in;
    std::vector<double> out;
    for (const auto& [g, v] : scores)
    {
        (std::binary_search(set.members.begin(), set.members.end(), g) ? in : out).push_back(v);
    }
    double lo = 1e300;
    double hi = -1e300;
    for (const auto& [g, v] : scores)
    {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double step = 1e-6 * (hi - lo);
    double best = 0.0;
    const auto ecdf = [](const std::vector<double>& xs, double t) {
        return static_cast<double>(std::count_if(xs.begin(), xs.end(),
                                                 [t](double x) { return x <= t; })) /
               static_cast<double>(xs.size());
    };
    for (double t = lo; t <= hi + step / 2; t += step)
    {
        best = std::max(best, std::abs(ecdf(in, t) - ecdf(out, t)));
    }
    // Grid points may step over each score by rounding; evaluate them too.
    for (const auto& [g, v] : scores)
    {
        best = std::max(best, std::abs(ecdf(in, v) - ecdf(out, v)));
    }
    return best;
}

}  // namespace

TEST_CASE("ks_statistic examples")
{
    const auto scores = named_scores({1, 2, 3, 4});
    CHECK(ks_statistic(scores, set_of({"g2", "g3"})) == 1.0);
    CHECK(ks_statistic(scores, set_of({"g0", "g2"})) == 0.5);
    const auto tied = named_scores({1, 1, 2, 2});
    CHECK(ks_statistic(tied, set_of({"g0", "g2"})) == 0.0);
    CHECK_THROWS_AS(ks_statistic(scores, set_of({"nope"})), std::invalid_argument);
    CHECK_THROWS_AS(ks_statistic(scores, set_of({"g0", "g1", "g2", "g3"})),
                    std::invalid_argument);
}

TEST_CASE("ks_statistic ignores unscored members")
{
    const auto scores = named_scores({1, 2, 3, 4});
    CHECK(ks_statistic(scores, set_of({"g2", "g3", "other"})) == 1.0);
}

TEST_CASE("ks_statistic invariances")
{
    std::mt19937_64 rng(1);
    std::normal_distribution<double> d;
    std::bernoulli_distribution coin(0.3);
    for (int trial = 0; trial < 200; ++trial)
    {
        const std::size_t n = 5 + trial % 40;
        std::vector<double> v(n);
        for (auto& x : v)
        {
            // Rounded so that ties occur.
            x = std::round(d(rng) * 4.0) / 4.0;
        }
        const auto scores = named_scores(v);
        std::vector<std::string> members;
        for (std::size_t i = 0; i < n; ++i)
        {
            if (coin(rng))
            {
                members.push_back("g" + std::to_string(i));
            }
        }
        if (members.empty() || members.size() == n)
        {
            continue;
        }
        const auto set = set_of(members);
        const double stat = ks_statistic(scores, set);
        CHECK(stat >= 0.0);
        CHECK(stat <= 1.0);
        CHECK(ks_statistic(scores, complement(scores, set)) == stat);
        ScoreMap transformed;
        for (const auto& [g, x] : scores)
        {
            transformed.emplace(g, std::exp(3.0 * x) - 7.0);
        }
        CHECK(ks_statistic(transformed, set) == stat);
    }
}

TEST_CASE("ks_statistic matches a brute-force grid for small pools")
{
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> level(0, 6);
    for (int trial = 0; trial < 60; ++trial)
    {
        const std::size_t n = 2 + trial % 9;
        std::vector<double> v(n);
        for (auto& x : v)
        {
            x = level(rng) * 0.5;
        }
        v[0] = 0.0;
        v[1] = 3.0;
        const auto scores = named_scores(v);
        std::vector<std::string> members{"g0"};
        for (std::size_t i = 2; i < n; i += 2)
        {
            members.push_back("g" + std::to_string(i));
        }
        const auto set = set_of(members);
        CHECK(std::abs(ks_statistic(scores, set) - brute_force_ks(scores, set)) <= 1e-12);
    }
}

TEST_CASE("ks_asymptotic_pvalue")
{
    CHECK(ks_asymptotic_pvalue(0.0, 10, 10) == 1.0);
    // Q(1.36) is close to 0.05 for large samples.
    CHECK(ks_asymptotic_pvalue(1.36 / std::sqrt(5000.0), 10000, 10000) ==
          doctest::Approx(0.0494).epsilon(0.02));
    CHECK(ks_asymptotic_pvalue(1.0, 100, 100) < 1e-20);
    const double p = ks_asymptotic_pvalue(0.2, 50, 500);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    CHECK_THROWS_AS(ks_asymptotic_pvalue(0.1, 0, 10), std::invalid_argument);
}

TEST_CASE("read_gmt")
{
    std::istringstream in("GO:1\tdesc one\tb\ta\tb\n\n# note\nGO:2\t\tz\n");
    const auto sets = read_gmt(in, "s.gmt");
    REQUIRE(sets.size() == 2);
    CHECK(sets[0].set_id == "GO:1");
    CHECK(sets[0].members == std::vector<std::string>{"a", "b"});
    CHECK(sets[0].source_line == 1);
    CHECK(sets[1].source_line == 4);
    std::istringstream bad("GO:1\tdesc\n");
    try
    {
        read_gmt(bad, "s.gmt");
        FAIL("expected DataError");
    }
    catch (const DataError& e)
    {
        CHECK(std::string(e.what()).rfind("s.gmt:1:", 0) == 0);
    }
    std::istringstream empty_members("GO:1\tdesc\t\t\n");
    CHECK_THROWS_AS(read_gmt(empty_members, "s.gmt"), DataError);
}

TEST_CASE("run_gsea filtering, p-values and ordering")
{
    std::vector<double> v(200);
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        v[i] = static_cast<double>(i);
    }
    const auto scores = named_scores(v);
    std::vector<std::string> top;
    for (std::size_t i = 180; i < 200; ++i)
    {
        top.push_back("g" + std::to_string(i));
    }
    std::vector<std::string> mixed;
    for (std::size_t i = 0; i < 200; i += 10)
    {
        mixed.push_back("g" + std::to_string(i));
    }
    const std::vector<GeneSet> sets{set_of({"g1", "g2", "g3", "g4", "g5"}, "small"),
                                    set_of(mixed, "mixed"), set_of(top, "top")};
    GseaOptions opt;
    opt.seed = 4;
    const auto res = run_gsea(scores, sets, opt);
    REQUIRE(res.size() == 2);
    CHECK(res[0].set_id == "top");
    CHECK(res[0].ks_stat == 1.0);
    CHECK(res[0].p_perm == doctest::Approx(1.0 / 1000.0).epsilon(1e-12));
    CHECK(res[0].k == 20);
    CHECK(res[0].k_prime == 180);
    CHECK(res[1].set_id == "mixed");
    CHECK(res[1].p_perm > 0.5);
    for (const auto& r : res)
    {
        CHECK(r.p_perm > 0.0);
        CHECK(r.p_perm <= 1.0);
        CHECK(r.k + r.k_prime == 200);
    }

    opt.threads = 3;
    const auto again = run_gsea(scores, sets, opt);
    CHECK(again[1].p_perm == res[1].p_perm);

    opt.min_size = 50;
    CHECK_THROWS_AS(run_gsea(scores, sets, opt), DataError);

    std::ostringstream out;
    write_gsea(out, res);
    CHECK(out.str().rfind("set_id\tk\tks_stat\tp_perm\tp_asymptotic\ntop\t20\t1\t0.001\t", 0) ==
          0);
}
