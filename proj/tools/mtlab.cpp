#include <CLI11.hpp>

#include "mt/service.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace mt;

namespace {

struct InstanceArgs {
    std::string cls = "lattice";
    int n = 3;
    std::string tie = "sum";
    std::string h0 = "0,0", target;
    int m = 6, k = 2;
    bool global = false;
    std::uint64_t seed = 0;
};

Cell parse_cell(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw DomainError("expected x,y but got " + s);
    return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
}

struct Built {
    FiniteInstance inst;
    int h0, target;
};

Built build_instance(const InstanceArgs& a) {
    if (a.cls == "lattice") {
        Lattice L(a.n, lattice_tie_rule_from(a.tie));
        Cell h0 = parse_cell(a.h0), t = a.target.empty() ? Cell{a.n - 1, a.n - 1} : parse_cell(a.target);
        L.check(h0);
        L.check(t);
        return {lattice_instance(L), static_cast<int>(L.id(h0)), static_cast<int>(L.id(t))};
    }
    if (a.cls == "synthetic") {
        auto s = synthetic_instance(a.m, a.k, a.global, a.seed);
        return {std::move(s.inst), s.h0, s.target};
    }
    if (a.cls == "tworec") {
        if (a.n > 4) throw Unsupported("2-Rec instances are enumerated only up to 4x4");
        auto cls = std::make_shared<TwoRecClass>(a.n);
        auto [h0, t] = sample_scenario(Scenario::H2to1, a.n, a.seed);
        return {tworec_instance(cls), static_cast<int>(cls->id(h0)), static_cast<int>(cls->id(t))};
    }
    throw DomainError("class must be lattice, synthetic or tworec");
}

void add_instance_options(CLI::App* c, InstanceArgs& a) {
    c->add_option("--class", a.cls, "lattice, synthetic or tworec")->check(CLI::IsMember({"lattice", "synthetic", "tworec"}));
    c->add_option("--n", a.n, "grid side");
    c->add_option("--tie", a.tie, "lattice tie rule: sum, lex or none");
    c->add_option("--h0", a.h0, "lattice start node x,y");
    c->add_option("--target", a.target, "lattice target node x,y");
    c->add_option("--m", a.m, "synthetic hypothesis count");
    c->add_option("--k", a.k, "synthetic removal subset size");
    c->add_flag("--global", a.global, "synthetic state-independent preference");
    c->add_option("--seed", a.seed, "seed");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot read " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"machine teaching lab"};
    app.require_subcommand(1);

    std::string spec_path, out_path;
    int threads = 0;
    auto* sim = app.add_subcommand("simulate", "run an experiment sweep and write CSV");
    sim->add_option("--spec", spec_path, "experiment spec JSON")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out_path, "CSV output path");
    sim->add_option("--threads", threads, "worker threads, overrides the spec");

    InstanceArgs inst;
    bool as_json = false;
    auto* opt = app.add_subcommand("optimal", "exact teaching costs on a small instance");
    add_instance_options(opt, inst);
    int cap = kDstarCap;
    opt->add_flag("--json", as_json, "emit the cost report as JSON");
    opt->add_option("--cap", cap, "hypothesis cap for the adaptive optimum")->check(CLI::Range(1, kMaxFiniteHyps));

    auto* cond = app.add_subcommand("check-conditions", "check the two greedy-bound conditions");
    add_instance_options(cond, inst);

    TraceSpec ts;
    std::optional<int> budget;
    auto* tr = app.add_subcommand("trace", "emit one seeded teaching trace as JSONL");
    tr->add_option("--class", ts.cls)->check(CLI::IsMember({"tworec", "lattice"}));
    tr->add_option("--teacher", ts.teacher)->check(CLI::IsMember(teacher_ids()));
    tr->add_option("--scenario", ts.scenario, "H1to1, H1to2, H2to1, H2to2 or strip");
    tr->add_option("--grid", ts.grid, "grid side, or strip length");
    tr->add_option("--seed", ts.seed);
    tr->add_option("--epsilon", ts.epsilon);
    tr->add_option("--budget", budget);
    tr->add_option("--a", ts.lattice_a, "lattice start coordinate");
    tr->add_option("--b", ts.lattice_b, "lattice target coordinate, negative counts from n");
    tr->add_option("--out", out_path);

    int port = 8080;
    std::string host = "127.0.0.1", data_dir;
    auto* srv = app.add_subcommand("serve", "serve the session API");
    srv->add_option("--port", port);
    srv->add_option("--host", host);
    srv->add_option("--data-dir", data_dir, "session log directory")->envname("MT_DATA_DIR");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            auto spec = ExperimentSpec::from_json(json::parse(read_file(spec_path)));
            if (threads > 0) spec.threads = threads;
            auto res = run_experiment(spec);
            for (const auto& s : res.skips)
                std::cerr << "skipped n=" << s.grid_size << " " << s.algorithm << " eps=" << format_epsilon(s.epsilon)
                          << ": " << s.reason << "\n";
            write_out(out_path, to_csv(res.rows));
        } else if (*opt) {
            auto b = build_instance(inst);
            auto r = cost_report(b.inst, b.h0, b.target, cap);
            if (as_json) {
                std::cout << r.to_json().dump(2) << "\n";
            } else {
                std::cout << "adaptive_opt " << r.adaptive_opt << "\n";
                std::cout << "nonadaptive_opt " << (r.nonadaptive_opt ? std::to_string(*r.nonadaptive_opt) : "-") << "\n";
                std::cout << "greedy " << r.greedy << "\nrank0 " << r.rank0 << "\n";
                for (const auto& n : r.notes) std::cout << "# " << n << "\n";
            }
        } else if (*cond) {
            auto b = build_instance(inst);
            std::cout << check_greedy_conditions(b.inst, b.target).to_json().dump(2) << "\n";
        } else if (*tr) {
            ts.budget = budget;
            auto r = run_trace(ts);
            write_out(out_path, trace_jsonl(r.trace));
        } else if (*srv) {
            std::optional<std::filesystem::path> dir;
            if (!data_dir.empty()) dir = data_dir;
            SessionStore store(dir, std::random_device{}());
            httplib::Server server;
            install_routes(server, store);
            std::cerr << "listening on " << host << ":" << port << "\n";
            if (!server.listen(host, port)) {
                std::cerr << "cannot bind " << host << ":" << port << "\n";
                return 1;
            }
        }
    } catch (const Unsupported& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
