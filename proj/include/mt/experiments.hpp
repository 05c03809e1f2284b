#pragma once

// Simulation harness: scenario sampling, factorial sweeps over grid size, algorithm, noise
// level and trial, CSV output, and the small fitting helpers used to read trends.

#include "mt/registry.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <thread>

namespace mt {

// ---- scenario sampling ----

inline Rect random_rect(int n, Rng& rng) {
    auto interval = [&](int& lo, int& hi) {
        // uniform over the n(n+1)/2 intervals [lo, hi]
        std::size_t k = rng.index(static_cast<std::size_t>(n) * (n + 1) / 2);
        lo = 0;
        while (k >= static_cast<std::size_t>(n - lo)) k -= static_cast<std::size_t>(n - lo++);
        hi = lo + static_cast<int>(k);
    };
    Rect r{};
    interval(r.x1, r.x2);
    interval(r.y1, r.y2);
    return r;
}

inline TwoRecHyp random_h1(int n, Rng& rng) { return TwoRecHyp::one(random_rect(n, rng)); }

// Uniform over H2: ordered pairs are rejection-sampled until separated, then canonicalized.
inline TwoRecHyp random_h2(int n, Rng& rng) {
    if (n < 3) throw DomainError("no two-rectangle hypothesis fits on a grid smaller than 3x3");
    for (;;) {
        Rect a = random_rect(n, rng), b = random_rect(n, rng);
        if (separated(a, b)) return TwoRecHyp::two(a, b);
    }
}

inline std::pair<TwoRecHyp, TwoRecHyp> sample_scenario(Scenario kind, int n, std::uint64_t seed) {
    Rng rng(seed);
    bool from_two = kind == Scenario::H2to1 || kind == Scenario::H2to2;
    bool to_two = kind == Scenario::H1to2 || kind == Scenario::H2to2;
    if ((from_two || to_two) && n < 3) throw DomainError("scenario " + to_string(kind) + " needs a 3x3 grid or larger");
    if (!from_two && !to_two && n < 2) throw DomainError("scenario needs at least two hypotheses");
    for (;;) {
        auto h0 = from_two ? random_h2(n, rng) : random_h1(n, rng);
        auto t = to_two ? random_h2(n, rng) : random_h1(n, rng);
        if (!(h0 == t)) return {h0, t};
    }
}

// ---- spec ----

struct ExperimentSpec {
    std::string cls = "tworec";     // "tworec" | "lattice"
    std::string scenario = "H2to1";  // 2-Rec scenario, "strip", or "diagonal" for the lattice
    int lattice_a = 2;
    int lattice_b = -2;  // negative values count from n
    std::vector<std::string> algorithms{"ada-r", "non-r", "sc", "rand"};
    int trials = 50;
    std::uint64_t seed = 0;
    std::vector<double> epsilons{0.0};
    std::vector<int> grid_sizes{4, 5, 6, 7, 8};  // side lengths, or strip lengths for "strip"
    bool adversarial = false;
    std::optional<int> budget;
    int threads = 1;

    static ExperimentSpec from_json(const json& j) {
        ExperimentSpec s;
        s.cls = j.value("class", s.cls);
        s.scenario = j.value("scenario", s.cls == "lattice" ? std::string("diagonal") : s.scenario);
        s.lattice_a = j.value("a", s.lattice_a);
        s.lattice_b = j.value("b", s.lattice_b);
        if (j.contains("algorithms")) s.algorithms = j.at("algorithms").get<std::vector<std::string>>();
        s.trials = j.value("trials", s.trials);
        s.seed = j.value("seed", s.seed);
        if (j.contains("epsilons")) s.epsilons = j.at("epsilons").get<std::vector<double>>();
        if (j.contains("grid_sizes")) s.grid_sizes = j.at("grid_sizes").get<std::vector<int>>();
        std::string tb = j.value("tiebreak", std::string("seeded"));
        if (tb != "seeded" && tb != "adversarial") throw DomainError("tiebreak must be seeded or adversarial");
        s.adversarial = tb == "adversarial";
        if (j.contains("budget") && !j.at("budget").is_null()) s.budget = j.at("budget").get<int>();
        s.threads = j.value("threads", s.threads);
        s.validate();
        return s;
    }

    json to_json() const {
        return {{"class", cls},       {"scenario", scenario},   {"a", lattice_a},
                {"b", lattice_b},     {"algorithms", algorithms}, {"trials", trials},
                {"seed", seed},       {"epsilons", epsilons},   {"grid_sizes", grid_sizes},
                {"tiebreak", adversarial ? "adversarial" : "seeded"},
                {"budget", budget ? json(*budget) : json(nullptr)}, {"threads", threads}};
    }

    void validate() const {
        if (cls != "tworec" && cls != "lattice") throw DomainError("class must be tworec or lattice");
        if (trials < 1) throw DomainError("trials must be at least 1");
        if (threads < 1) throw DomainError("threads must be at least 1");
        for (double e : epsilons)
            if (e < 0 || e > 1) throw DomainError("epsilon must be in [0,1]");
        if (algorithms.empty() || grid_sizes.empty() || epsilons.empty()) throw DomainError("empty sweep axis");
        if (cls == "lattice" && scenario != "diagonal") throw DomainError("lattice scenario must be diagonal");
        if (cls == "tworec" && scenario != "strip") scenario_from(scenario);
        if (budget && *budget < 1) throw DomainError("budget must be positive");
    }
};

inline int default_budget_tworec(int n) { return n * n * 6 / 10; }
inline int default_budget_lattice(int n) { return 2 * n * n; }

// ---- results ----

struct ResultRow {
    std::string cls, scenario;
    int grid_size = 0;
    std::string algorithm;
    double epsilon = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    int examples_used = 0;
    bool reached = false;
};

struct Skip {
    int grid_size;
    std::string algorithm;
    double epsilon;
    std::string reason;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::vector<Skip> skips;  // one per skipped (grid, algorithm, epsilon) cell
};

inline std::string format_epsilon(double e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", e);
    return buf;
}

inline const char* kCsvHeader = "class,scenario,grid_size,algorithm,epsilon,trial,seed,examples_used,reached";

inline std::string to_csv(const std::vector<ResultRow>& rows) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : rows)
        out += r.cls + "," + r.scenario + "," + std::to_string(r.grid_size) + "," + r.algorithm + "," +
               format_epsilon(r.epsilon) + "," + std::to_string(r.trial) + "," + std::to_string(r.seed) + "," +
               std::to_string(r.examples_used) + "," + (r.reached ? "true" : "false") + "\n";
    return out;
}

// ---- running ----

namespace detail {

struct CellTask {
    int grid_size;
    std::string algorithm;
    double epsilon;
    int trial;
};

// Shared read-only class tables, built once per grid size before the sweep.
struct ClassCache {
    std::map<int, std::shared_ptr<const TwoRecClass>> implicit, enumerated;
};

inline int side_of(const ExperimentSpec& spec, int g) { return spec.scenario == "strip" ? g + 2 : g; }

inline bool needs_enumeration(const ExperimentSpec& spec, const std::string& algo, double eps) {
    return tworec_needs_enumeration(algo) || eps > 0;
}

inline ResultRow run_tworec_cell(const ExperimentSpec& spec, const ClassCache& cache, const CellTask& c) {
    const int n = side_of(spec, c.grid_size);
    const std::uint64_t trial_seed = seed_of(spec.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(c.trial));
    TwoRecHyp h0, target;
    if (spec.scenario == "strip") {
        auto st = strip_instance(c.grid_size);
        h0 = st.h0;
        target = st.target;
    } else {
        std::tie(h0, target) = sample_scenario(scenario_from(spec.scenario), n, trial_seed);
    }
    check_tworec_teacher(c.algorithm, n);
    const bool expl = needs_enumeration(spec, c.algorithm, c.epsilon);
    if (expl && n > kTwoRecEnumerationCap) throw Unsupported("grid exceeds the enumeration cap");
    auto cls = expl ? cache.enumerated.at(n) : cache.implicit.at(n);
    const int budget = spec.budget.value_or(default_budget_tworec(n));
    auto teacher = make_tworec_teacher(c.algorithm, cls, h0, target, seed_of(trial_seed, 2));
    auto s0 = initial_state(*cls, h0, expl);

    ResultRow row{spec.cls, spec.scenario, n, c.algorithm, c.epsilon, c.trial, trial_seed, 0, false};
    if (spec.adversarial) {
        if (c.epsilon > 0) throw Unsupported("adversarial ties are not combined with noise");
        auto w = worst_case_tworec(*cls, s0, target, teacher, budget);
        row.reached = w.reached;
        row.examples_used = w.reached ? w.cost : budget;
        return row;
    }
    TwoRecLearner learner(cls, {TieBreak::seeded(seed_of(trial_seed, 1)), {c.epsilon}});
    auto r = run_teaching(learner, teacher, s0, target, budget);
    row.reached = r.reached;
    row.examples_used = r.reached ? r.examples_used : budget;
    return row;
}

inline ResultRow run_lattice_cell(const ExperimentSpec& spec, const CellTask& c) {
    const int n = c.grid_size;
    const int a = spec.lattice_a, b = spec.lattice_b < 0 ? n + spec.lattice_b : spec.lattice_b;
    if (a < 0 || b >= n || a == b) throw DomainError("diagonal endpoints out of range");
    const std::uint64_t trial_seed = seed_of(spec.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(c.trial));
    Lattice L(n);
    const Cell h0{a, a}, target{b, b};
    const int budget = spec.budget.value_or(default_budget_lattice(n));
    auto teacher = make_lattice_teacher(c.algorithm, L, h0, target, seed_of(trial_seed, 2));
    auto s0 = initial_state(L, h0);

    ResultRow row{spec.cls, spec.scenario, n, c.algorithm, c.epsilon, c.trial, trial_seed, 0, false};
    if (spec.adversarial) {
        if (c.epsilon > 0) throw Unsupported("adversarial ties are not combined with noise");
        auto w = worst_case_lattice(L, s0, target, teacher, budget);
        row.reached = w.reached;
        row.examples_used = w.reached ? w.cost : budget;
        return row;
    }
    LatticeLearner learner(L, {TieBreak::seeded(seed_of(trial_seed, 1)), {c.epsilon}});
    auto r = run_teaching(learner, teacher, s0, target, budget);
    row.reached = r.reached;
    row.examples_used = r.reached ? r.examples_used : budget;
    return row;
}

}  // namespace detail

// Rows come back in spec order: grid size, algorithm, epsilon, trial.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<detail::CellTask> tasks;
    for (int g : spec.grid_sizes)
        for (const auto& a : spec.algorithms)
            for (double e : spec.epsilons)
                for (int t = 0; t < spec.trials; ++t) tasks.push_back({g, a, e, t});

    detail::ClassCache cache;
    if (spec.cls == "tworec") {
        for (int g : spec.grid_sizes) {
            int n = detail::side_of(spec, g);
            cache.implicit[n] = std::make_shared<TwoRecClass>(n, TwoRecPrefs{}, 0);
            bool need = false;
            for (const auto& a : spec.algorithms)
                for (double e : spec.epsilons) need = need || detail::needs_enumeration(spec, a, e);
            if (need && n <= kTwoRecEnumerationCap && !cache.enumerated.count(n))
                cache.enumerated[n] = std::make_shared<TwoRecClass>(n);
        }
    }

    std::vector<std::optional<ResultRow>> out(tasks.size());
    std::vector<std::string> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next++) < tasks.size();) {
            try {
                out[i] = spec.cls == "tworec" ? detail::run_tworec_cell(spec, cache, tasks[i])
                                              : detail::run_lattice_cell(spec, tasks[i]);
            } catch (const Unsupported& e) {
                errors[i] = e.what();
            } catch (const DomainError& e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int k = 1; k < spec.threads; ++k) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    ExperimentResult res;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (out[i]) {
            res.rows.push_back(*out[i]);
            continue;
        }
        const auto& t = tasks[i];
        bool seen = std::any_of(res.skips.begin(), res.skips.end(), [&](const Skip& s) {
            return s.grid_size == detail::side_of(spec, t.grid_size) && s.algorithm == t.algorithm &&
                   s.epsilon == t.epsilon;
        });
        if (!seen) res.skips.push_back({detail::side_of(spec, t.grid_size), t.algorithm, t.epsilon, errors[i]});
    }
    return res;
}

// ---- single traced runs ----

struct TraceSpec {
    std::string cls = "tworec";
    std::string teacher = "ada-r";
    std::string scenario = "H2to1";
    int grid = 6;
    std::uint64_t seed = 0;
    double epsilon = 0.0;
    std::optional<int> budget;
    int lattice_a = 2, lattice_b = -2;
};

// One seeded run; the learner and teacher seeds match the sweep's seeds for the same trial seed.
inline RunResult run_trace(const TraceSpec& t) {
    if (t.epsilon < 0 || t.epsilon > 1) throw DomainError("epsilon must lie in [0, 1]");
    const LearnerConfig cfg{TieBreak::seeded(seed_of(t.seed, 1)), {t.epsilon}};
    if (t.cls == "lattice") {
        const int n = t.grid, a = t.lattice_a, b = t.lattice_b < 0 ? n + t.lattice_b : t.lattice_b;
        if (a < 0 || b >= n || a == b) throw DomainError("diagonal endpoints out of range");
        Lattice L(n);
        auto teacher = make_lattice_teacher(t.teacher, L, {a, a}, {b, b}, seed_of(t.seed, 2));
        auto s = initial_state(L, {a, a});
        LatticeLearner learner(L, cfg);
        return run_teaching(learner, teacher, s, Cell{b, b}, t.budget.value_or(default_budget_lattice(n)));
    }
    if (t.cls != "tworec") throw DomainError("class must be tworec or lattice");
    TwoRecHyp h0, target;
    int n = t.grid;
    if (t.scenario == "strip") {
        auto st = strip_instance(t.grid);
        n = st.n;
        h0 = st.h0;
        target = st.target;
    } else {
        std::tie(h0, target) = sample_scenario(scenario_from(t.scenario), n, t.seed);
    }
    check_tworec_teacher(t.teacher, n);
    const bool expl = tworec_needs_enumeration(t.teacher) || t.epsilon > 0;
    if (expl && n > kTwoRecEnumerationCap) throw Unsupported("grid exceeds the enumeration cap");
    auto cls = expl ? std::make_shared<TwoRecClass>(n) : std::make_shared<TwoRecClass>(n, TwoRecPrefs{}, 0);
    auto teacher = make_tworec_teacher(t.teacher, cls, h0, target, seed_of(t.seed, 2));
    auto s = initial_state(*cls, h0, expl);
    TwoRecLearner learner(cls, cfg);
    return run_teaching(learner, teacher, s, target, t.budget.value_or(default_budget_tworec(n)));
}

// ---- reading results ----

struct CellStats {
    double mean = 0;
    int max = 0;
    int count = 0;
    int reached = 0;
};

// Keyed by (grid size, algorithm, epsilon).
inline std::map<std::tuple<int, std::string, double>, CellStats> summarize(const std::vector<ResultRow>& rows) {
    std::map<std::tuple<int, std::string, double>, CellStats> out;
    for (const auto& r : rows) {
        auto& c = out[{r.grid_size, r.algorithm, r.epsilon}];
        c.mean += r.examples_used;
        c.max = std::max(c.max, r.examples_used);
        ++c.count;
        c.reached += r.reached;
    }
    for (auto& [k, c] : out) c.mean /= c.count;
    return out;
}

struct Fit {
    double slope = 0, intercept = 0, r2 = 0;
};

// Least squares y = slope * x + intercept.
inline Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("fit needs at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    Fit f;
    const double den = n * sxx - sx * sx;
    f.slope = den == 0 ? 0 : (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double mean = sy / n, ss_tot = 0, ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double p = f.slope * x[i] + f.intercept;
        ss_tot += (y[i] - mean) * (y[i] - mean);
        ss_res += (y[i] - p) * (y[i] - p);
    }
    f.r2 = ss_tot == 0 ? 1.0 : 1.0 - ss_res / ss_tot;
    return f;
}

inline Fit log_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx;
    for (double v : x) lx.push_back(std::log2(v));
    return linear_fit(lx, y);
}

}  // namespace mt
