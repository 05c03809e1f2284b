#include <doctest.h>

#include "mt/experiments.hpp"

using namespace mt;

TEST_CASE("scenario sampling") {
    auto a = sample_scenario(Scenario::H2to1, 5, 42), b = sample_scenario(Scenario::H2to1, 5, 42);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
    CHECK(a.first.is_two());
    CHECK_FALSE(a.second.is_two());
    for (std::uint64_t s = 0; s < 500; ++s) {
        auto [h0, t] = sample_scenario(Scenario::H2to2, 4 + static_cast<int>(s % 4), s);
        CHECK(separated(h0.r1(), h0.r2()));
        CHECK(separated(t.r1(), t.r2()));
        CHECK(h0.r1() < h0.r2());
        CHECK_FALSE(h0 == t);
    }
    CHECK_THROWS_AS(sample_scenario(Scenario::H2to1, 2, 1), DomainError);
    CHECK_NOTHROW(sample_scenario(Scenario::H1to1, 2, 1));
}

TEST_CASE("one-rectangle sampling is uniform on 4x4") {
    auto rects = all_rects(4);
    REQUIRE(rects.size() == 100);
    std::map<Rect, int> hist;
    Rng rng(7);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) ++hist[random_rect(4, rng)];
    CHECK(hist.size() == 100);
    double expected = draws / 100.0, chi2 = 0;
    for (const auto& r : rects) chi2 += (hist[r] - expected) * (hist[r] - expected) / expected;
    CHECK(chi2 < 148.2);  // chi-square, 99 dof, p = 0.001
}

TEST_CASE("two-rectangle sampling is uniform on 4x4") {
    TwoRecClass cls(4);
    const std::size_t h2 = cls.size() - cls.h1_count();
    std::vector<int> hist(cls.size(), 0);
    Rng rng(3);
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) ++hist[cls.id(random_h2(4, rng))];
    double expected = static_cast<double>(draws) / static_cast<double>(h2), chi2 = 0;
    for (std::size_t i = cls.h1_count(); i < cls.size(); ++i)
        chi2 += (hist[i] - expected) * (hist[i] - expected) / expected;
    const double dof = static_cast<double>(h2 - 1);
    CHECK(chi2 < dof + 4.0 * std::sqrt(2.0 * dof));
}

TEST_CASE("spec parsing and validation") {
    auto s = ExperimentSpec::from_json(json::parse(R"({"class":"lattice","algorithms":["ada-l"],"grid_sizes":[6]})"));
    CHECK(s.scenario == "diagonal");
    CHECK(s.trials == 50);
    auto back = ExperimentSpec::from_json(s.to_json());
    CHECK(back.to_json() == s.to_json());
    CHECK_THROWS_AS(ExperimentSpec::from_json(json::parse(R"({"trials":0})")), DomainError);
    CHECK_THROWS_AS(ExperimentSpec::from_json(json::parse(R"({"epsilons":[1.5]})")), DomainError);
    CHECK_THROWS_AS(ExperimentSpec::from_json(json::parse(R"({"class":"disk"})")), DomainError);
    CHECK_THROWS_AS(ExperimentSpec::from_json(json::parse(R"({"scenario":"H3to1"})")), DomainError);
    CHECK_THROWS_AS(ExperimentSpec::from_json(json::parse(R"({"tiebreak":"coin"})")), DomainError);
}

TEST_CASE("sweep shape, skips and determinism") {
    ExperimentSpec s;
    s.scenario = "H2to1";
    s.grid_sizes = {4, 5};
    s.algorithms = {"ada-r", "non-r", "myopic", "rand"};
    s.epsilons = {0.0, 0.5};
    s.trials = 3;
    s.seed = 11;
    auto r = run_experiment(s);
    // myopic is capped at 4x4
    REQUIRE(r.skips.size() == 2);
    for (const auto& k : r.skips) {
        CHECK(k.algorithm == "myopic");
        CHECK(k.grid_size == 5);
    }
    CHECK(r.rows.size() == 2 * 4 * 2 * 3 - 2 * 3);
    for (const auto& row : r.rows) {
        CHECK(row.examples_used <= default_budget_tworec(row.grid_size));
        if (!row.reached) CHECK(row.examples_used == default_budget_tworec(row.grid_size));
    }
    auto csv = to_csv(r.rows);
    CHECK(csv.substr(0, csv.find('\n')) == kCsvHeader);
    CHECK(to_csv(run_experiment(s).rows) == csv);
    s.threads = 3;
    CHECK(to_csv(run_experiment(s).rows) == csv);
}

TEST_CASE("rows pair the same instance across algorithms") {
    ExperimentSpec s;
    s.grid_sizes = {6};
    s.algorithms = {"ada-r", "sc"};
    s.trials = 4;
    auto r = run_experiment(s);
    REQUIRE(r.rows.size() == 8);
    for (int t = 0; t < 4; ++t) CHECK(r.rows[t].seed == r.rows[4 + t].seed);
}

TEST_CASE("epsilon zero rows equal the noise-free rows") {
    ExperimentSpec s;
    s.grid_sizes = {5};
    s.algorithms = {"ada-r", "sc"};
    s.trials = 5;
    auto a = run_experiment(s);
    s.epsilons = {0.0, 0.3};
    auto b = run_experiment(s);
    for (const auto& row : a.rows) {
        auto it = std::find_if(b.rows.begin(), b.rows.end(), [&](const ResultRow& o) {
            return o.algorithm == row.algorithm && o.trial == row.trial && o.epsilon == 0.0;
        });
        REQUIRE(it != b.rows.end());
        CHECK(it->examples_used == row.examples_used);
    }
}

TEST_CASE("lattice sweep under adversarial ties") {
    ExperimentSpec s;
    s.cls = "lattice";
    s.scenario = "diagonal";
    s.algorithms = {"ada-l", "non-l"};
    s.grid_sizes = {6, 7, 8, 9, 10, 11, 12};
    s.trials = 1;
    s.adversarial = true;
    auto r = run_experiment(s);
    auto stats = summarize(r.rows);
    for (int n : s.grid_sizes) {
        double ada = stats[{n, "ada-l", 0.0}].mean, non = stats[{n, "non-l", 0.0}].mean;
        CHECK(non - ada >= (n - 2) - 2);
        CHECK(ada <= 3 * 2 * (n - 4));
    }
}

TEST_CASE("lattice optimal teacher on a 3x3 board") {
    ExperimentSpec s;
    s.cls = "lattice";
    s.scenario = "diagonal";
    s.algorithms = {"optimal", "ada-l"};
    s.grid_sizes = {3, 4};
    s.lattice_a = 0;
    s.lattice_b = -1;
    s.trials = 1;
    s.adversarial = true;
    auto r = run_experiment(s);
    REQUIRE(r.skips.size() == 1);
    CHECK(r.skips[0].grid_size == 4);
    auto stats = summarize(r.rows);
    Lattice L(3);
    CHECK(stats[{3, "optimal", 0.0}].mean == dstar(lattice_instance(L), 0, 8));
    CHECK(stats[{3, "optimal", 0.0}].mean <= stats[{3, "ada-l", 0.0}].mean);
}

TEST_CASE("strip sweep") {
    ExperimentSpec s;
    s.scenario = "strip";
    s.algorithms = {"non-r", "ada-r"};
    s.grid_sizes = {4, 8};
    s.trials = 2;
    auto r = run_experiment(s);
    for (const auto& row : r.rows) {
        CHECK(row.reached);
        if (row.algorithm == "non-r") CHECK(row.examples_used == row.grid_size - 2);
    }
}

TEST_CASE("fits") {
    auto f = linear_fit({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(f.slope == doctest::Approx(2));
    CHECK(f.intercept == doctest::Approx(1));
    CHECK(f.r2 == doctest::Approx(1));
    auto g = log_fit({2, 4, 8, 16}, {1, 2, 3, 4});
    CHECK(g.slope == doctest::Approx(1));
    CHECK(g.r2 == doctest::Approx(1));
    CHECK_THROWS_AS(linear_fit({1}, {1}), DomainError);
}
