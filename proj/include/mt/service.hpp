#pragma once

// Interactive sessions behind a JSON HTTP API. The client plays the learner: it declares
// hypotheses, the server validates them against the revealed cells and, in teach mode, asks
// the chosen teacher for the next example. Sessions are persisted as append-only JSONL.

#include "mt/experiments.hpp"

#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <random>

namespace mt {

struct ApiError : std::runtime_error {
    int status;
    json body;
    ApiError(int s, const std::string& msg, json extra = json::object())
        : std::runtime_error(msg), status(s), body(std::move(extra)) {
        body["error"] = msg;
    }
};

// Enumerated 2-Rec classes shared read-only by all sessions.
class ClassTables {
public:
    std::shared_ptr<const TwoRecClass> tworec(int n, bool enumerated) {
        std::lock_guard lk(mu_);
        auto& slot = (enumerated ? enumerated_ : implicit_)[n];
        if (!slot) slot = std::make_shared<TwoRecClass>(n, TwoRecPrefs{}, enumerated ? kTwoRecEnumerationCap : 0);
        return slot;
    }

private:
    std::mutex mu_;
    std::map<int, std::shared_ptr<const TwoRecClass>> enumerated_, implicit_;
};

class Session {
public:
    virtual ~Session() = default;
    virtual json view() const = 0;
    virtual json submit(const json& body) = 0;
    virtual json trace() const = 0;
    std::mutex mu;
};

namespace detail {

struct TwoRecPolicy {
    using Hyp = TwoRecHyp;
    using State = TwoRecState;
    std::shared_ptr<const TwoRecClass> cls;

    int n() const { return cls->n(); }
    Hyp parse(const json& j) const { return tworec_from_json(j, cls->n()); }
    static json to_json(const Hyp& h) { return mt::to_json(h); }
    bool label(const Hyp& h, Cell c) const { return cls->label(h, c); }
    void reveal(State& s, const LabeledExample& z) const {
        s.grid.add(z);
        if (s.vs) cls->restrict(*s.vs, z);
        s.shown.push_back(z);
        ++s.t;
    }
    std::optional<long> vs_size(const State& s) const {
        if (!s.vs) return std::nullopt;
        return static_cast<long>(s.vs->count());
    }
    static int default_budget(int n) { return default_budget_tworec(n); }
};

struct LatticePolicy {
    using Hyp = Cell;
    using State = LatticeState;
    Lattice cls;

    int n() const { return cls.n(); }
    Hyp parse(const json& j) const {
        Cell c = cls.from_json(j);
        cls.check(c);
        return c;
    }
    static json to_json(const Hyp& h) { return Lattice::to_json(h); }
    bool label(const Hyp& h, Cell c) const { return cls.label(h, c); }
    void reveal(State& s, const LabeledExample& z) const {
        cls.restrict(s.vs, z);
        s.shown.push_back(z);
        ++s.t;
    }
    std::optional<long> vs_size(const State& s) const { return static_cast<long>(s.vs.count()); }
    static int default_budget(int n) { return default_budget_lattice(n); }
};

struct SessionConfig {
    std::string id, mode, cls, teacher, scenario;
    int n = 0;
    std::uint64_t seed = 0;
    int budget = 0;
};

template <class P>
class SessionT : public Session {
public:
    using Hyp = typename P::Hyp;
    using State = typename P::State;

    SessionT(SessionConfig cfg, P policy, Hyp h0, Hyp target, State s0, TeacherFn<State> teacher)
        : cfg_(std::move(cfg)), p_(std::move(policy)), h0_(h0), target_(target), state_(std::move(s0)),
          teacher_(std::move(teacher)) {
        if (cfg_.mode == "teach") {
            next_example();
        } else {
            elicit_first();
        }
    }

    json view() const override {
        json j{{"id", cfg_.id},
               {"mode", cfg_.mode},
               {"class", cfg_.cls},
               {"grid", cfg_.n},
               {"teacher", cfg_.mode == "teach" ? json(cfg_.teacher) : json(nullptr)},
               {"status", status_},
               {"step", declared_.size()},
               {"h0", P::to_json(h0_)},
               {"budget", cfg_.budget},
               {"remaining", cfg_.budget - static_cast<int>(revealed_.size())}};
        json rev = json::array();
        for (const auto& z : revealed_) rev.push_back(example_json(z));
        j["revealed"] = rev;
        j["pending"] = pending_;
        j["declared"] = declared_;
        if (status_ != "active") j["target"] = P::to_json(target_);
        return j;
    }

    json submit(const json& body) override {
        if (!body.is_object() || !body.contains("hypothesis")) throw ApiError(400, "body must carry a hypothesis");
        Hyp h;
        try {
            h = p_.parse(body.at("hypothesis"));
        } catch (const std::exception& e) {
            throw ApiError(400, std::string("malformed hypothesis: ") + e.what());
        }
        if (body.contains("step")) {
            auto k = body.at("step").get<std::size_t>();
            if (k < declared_.size() && declared_[k] == P::to_json(h)) return responses_[k];
            if (k != declared_.size()) throw ApiError(409, "step out of order");
        }
        if (status_ != "active") throw ApiError(409, "session is " + status_);
        json bad = json::array();
        for (const auto& z : revealed_)
            if (p_.label(h, z.at) != z.label) bad.push_back(example_json(z));
        if (!bad.empty()) throw ApiError(422, "hypothesis contradicts revealed cells", {{"violations", bad}});

        declared_.push_back(P::to_json(h));
        state_.h = h;
        json resp;
        if (cfg_.mode == "teach") {
            steps_.push_back({state_.t, state_.shown.back(), P::to_json(h), p_.vs_size(state_)});
            pending_ = nullptr;
            if (h == target_) {
                status_ = "reached";
                resp = {{"verdict", "reached"}};
            } else if (static_cast<int>(revealed_.size()) >= cfg_.budget || !next_example()) {
                status_ = "exhausted";
                resp = {{"verdict", "exhausted"}};
            } else {
                resp = {{"verdict", "continue"}, {"example", pending_}};
            }
        } else {
            if (h == target_) {
                status_ = "reached";
                resp = {{"verdict", "reached"}};
            } else if (declared_.size() >= 2) {
                status_ = "exhausted";
                resp = {{"verdict", "recorded"}};
            } else {
                resp = {{"verdict", "continue"}, {"examples", elicit_second(h)}};
            }
        }
        resp["status"] = status_;
        resp["step"] = declared_.size();
        if (status_ != "active") resp["target"] = P::to_json(target_);
        responses_.push_back(resp);
        return resp;
    }

    json trace() const override {
        json steps = json::array();
        for (const auto& s : steps_) steps.push_back(step_json(s));
        json rev = json::array();
        for (const auto& z : revealed_) rev.push_back(example_json(z));
        return {{"id", cfg_.id},   {"mode", cfg_.mode},     {"h0", P::to_json(h0_)}, {"steps", steps},
                {"revealed", rev}, {"declared", declared_}, {"status", status_}};
    }

    const json& first_response() const { return pending_; }

private:
    bool next_example() {
        auto z = teacher_(state_);
        if (!z) return false;
        if (z->label != p_.label(target_, z->at)) throw InconsistentTeaching("teacher emitted an inconsistent example");
        reveal(*z);
        pending_ = example_json(*z);
        return true;
    }

    void reveal(const LabeledExample& z) {
        p_.reveal(state_, z);
        revealed_.push_back(z);
    }

    bool shown(Cell c) const {
        return std::any_of(revealed_.begin(), revealed_.end(), [&](const auto& z) { return z.at == c; });
    }

    std::vector<Cell> unshown() const {
        std::vector<Cell> out;
        for (int x = 0; x < p_.n(); ++x)
            for (int y = 0; y < p_.n(); ++y)
                if (!shown({x, y})) out.push_back({x, y});
        return out;
    }

    // Step one: a seeded handful of labeled cells, at least one of them positive.
    void elicit_first() {
        Rng rng(seed_of(cfg_.seed, "elicit"));
        auto cells = unshown();
        std::vector<Cell> pos;
        for (Cell c : cells)
            if (p_.label(target_, c)) pos.push_back(c);
        if (!pos.empty()) reveal({pos[rng.index(pos.size())], true});
        const int k = std::max(3, p_.n() * p_.n() / 8);
        while (static_cast<int>(revealed_.size()) < k) {
            auto rest = unshown();
            if (rest.empty()) break;
            Cell c = rest[rng.index(rest.size())];
            reveal({c, p_.label(target_, c)});
        }
    }

    // Step two: a cell the declared hypothesis gets wrong, if any, plus one more cell.
    json elicit_second(const Hyp& h) {
        Rng rng(seed_of(cfg_.seed, "elicit2"));
        json added = json::array();
        auto rest = unshown();
        std::vector<Cell> wrong;
        for (Cell c : rest)
            if (p_.label(h, c) != p_.label(target_, c)) wrong.push_back(c);
        if (!wrong.empty()) {
            Cell c = wrong[rng.index(wrong.size())];
            reveal({c, p_.label(target_, c)});
            added.push_back(example_json(revealed_.back()));
        }
        rest = unshown();
        if (!rest.empty()) {
            Cell c = rest[rng.index(rest.size())];
            reveal({c, p_.label(target_, c)});
            added.push_back(example_json(revealed_.back()));
        }
        return added;
    }

    SessionConfig cfg_;
    P p_;
    Hyp h0_, target_;
    State state_;
    TeacherFn<State> teacher_;
    std::string status_ = "active";
    std::vector<LabeledExample> revealed_;
    json pending_ = nullptr;
    json declared_ = json::array();
    std::vector<json> responses_;
    std::vector<TraceStep> steps_;
};

inline std::shared_ptr<Session> build_session(const std::string& id, const json& req, ClassTables& tables) {
    if (!req.is_object()) throw ApiError(400, "request must be a JSON object");
    SessionConfig cfg;
    cfg.id = id;
    try {
        cfg.cls = req.value("class", std::string("tworec"));
        cfg.mode = req.value("mode", std::string("teach"));
        cfg.teacher = req.value("teacher", std::string(cfg.mode == "teach" ? "" : "none"));
        cfg.n = req.value("grid", 8);
        cfg.seed = req.value("seed", std::uint64_t{0});
        if (cfg.mode != "teach" && cfg.mode != "elicit") throw DomainError("mode must be teach or elicit");
        if (cfg.n < 2 || cfg.n > 60) throw DomainError("grid must be in [2, 60]");
        if (cfg.mode == "teach" && cfg.teacher.empty()) throw DomainError("teach mode needs a teacher");

        if (cfg.cls == "tworec") {
            cfg.scenario = req.value("scenario", std::string("H2to1"));
            if (cfg.mode == "teach") check_tworec_teacher(cfg.teacher, cfg.n);
            bool expl = cfg.mode == "teach" && tworec_needs_enumeration(cfg.teacher);
            auto cls = tables.tworec(cfg.n, expl);
            TwoRecHyp h0, target;
            if (req.contains("h0") && req.contains("target")) {
                h0 = tworec_from_json(req.at("h0"), cfg.n);
                target = tworec_from_json(req.at("target"), cfg.n);
            } else {
                std::tie(h0, target) = sample_scenario(scenario_from(cfg.scenario), cfg.n, cfg.seed);
            }
            cfg.budget = req.value("budget", TwoRecPolicy::default_budget(cfg.n));
            if (cfg.budget < 1) throw DomainError("budget must be positive");
            TeacherFn<TwoRecState> teacher;
            if (cfg.mode == "teach") teacher = make_tworec_teacher(cfg.teacher, cls, h0, target, seed_of(cfg.seed, 2));
            auto s0 = initial_state(*cls, h0, expl);
            return std::make_shared<SessionT<TwoRecPolicy>>(cfg, TwoRecPolicy{cls}, h0, target, s0, teacher);
        }
        if (cfg.cls == "lattice") {
            cfg.scenario = "diagonal";
            Lattice L(cfg.n);
            if (cfg.mode == "teach") check_lattice_teacher(cfg.teacher, cfg.n);
            Cell h0, target;
            if (req.contains("h0") && req.contains("target")) {
                h0 = L.from_json(req.at("h0"));
                target = L.from_json(req.at("target"));
            } else {
                int a = req.value("a", std::min(2, cfg.n - 2)), b = req.value("b", cfg.n - 1 - std::min(2, cfg.n - 2));
                h0 = {a, a};
                target = {b, b};
            }
            L.check(h0);
            L.check(target);
            if (h0 == target) throw DomainError("h0 must differ from the target");
            cfg.budget = req.value("budget", LatticePolicy::default_budget(cfg.n));
            if (cfg.budget < 1) throw DomainError("budget must be positive");
            TeacherFn<LatticeState> teacher;
            if (cfg.mode == "teach") teacher = make_lattice_teacher(cfg.teacher, L, h0, target, seed_of(cfg.seed, 2));
            return std::make_shared<SessionT<LatticePolicy>>(cfg, LatticePolicy{L}, h0, target, initial_state(L, h0),
                                                            teacher);
        }
        throw DomainError("class must be tworec or lattice");
    } catch (const ApiError&) {
        throw;
    } catch (const json::exception& e) {
        throw ApiError(400, std::string("invalid request: ") + e.what());
    } catch (const std::exception& e) {
        throw ApiError(400, e.what());
    }
}

}  // namespace detail

class SessionStore {
public:
    // With a directory, every session is written to <dir>/<id>.jsonl and reloaded on start.
    explicit SessionStore(std::optional<std::filesystem::path> dir = std::nullopt,
                          std::uint64_t nonce = std::random_device{}())
        : dir_(std::move(dir)), nonce_(nonce) {
        if (dir_) {
            std::filesystem::create_directories(*dir_);
            load();
        }
    }

    // Returns the session view plus the first example (teach) or first revealed cells (elicit).
    json create(const json& req) {
        std::string id;
        {
            std::lock_guard lk(mu_);
            do {
                char buf[17];
                std::snprintf(buf, sizeof buf, "%016llx",
                              static_cast<unsigned long long>(seed_of(nonce_, counter_++)));
                id = buf;
            } while (sessions_.count(id));
        }
        auto s = detail::build_session(id, req, tables_);
        std::lock_guard slk(s->mu);
        {
            std::lock_guard lk(mu_);
            sessions_[id] = s;
        }
        append(id, {{"event", "create"}, {"request", req}});
        return s->view();
    }

    json get(const std::string& id) {
        auto s = find(id);
        std::lock_guard lk(s->mu);
        return s->view();
    }

    json submit(const std::string& id, const json& body) {
        auto s = find(id);
        std::lock_guard lk(s->mu);
        auto before = s->view()["step"].get<std::size_t>();
        auto resp = s->submit(body);
        if (s->view()["step"].get<std::size_t>() > before) append(id, {{"event", "hypothesis"}, {"body", body}});
        return resp;
    }

    json trace(const std::string& id) {
        auto s = find(id);
        std::lock_guard lk(s->mu);
        return s->trace();
    }

    std::size_t size() {
        std::lock_guard lk(mu_);
        return sessions_.size();
    }

private:
    std::shared_ptr<Session> find(const std::string& id) {
        std::lock_guard lk(mu_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw ApiError(404, "unknown session");
        return it->second;
    }

    void append(const std::string& id, const json& record) {
        if (!dir_) return;
        std::string line = record.dump() + "\n";
        std::ofstream f(*dir_ / (id + ".jsonl"), std::ios::app | std::ios::binary);
        f.write(line.data(), static_cast<std::streamsize>(line.size()));
        f.flush();
    }

    // Replays every stored session; examples are regenerated by the deterministic teachers.
    void load() {
        for (const auto& entry : std::filesystem::directory_iterator(*dir_)) {
            if (entry.path().extension() != ".jsonl") continue;
            std::string id = entry.path().stem().string();
            std::ifstream f(entry.path());
            std::string line;
            std::shared_ptr<Session> s;
            while (std::getline(f, line)) {
                if (line.empty()) continue;
                auto rec = json::parse(line, nullptr, false);
                if (rec.is_discarded()) break;  // torn final write
                if (rec.value("event", "") == "create") {
                    s = detail::build_session(id, rec.at("request"), tables_);
                } else if (s) {
                    s->submit(rec.at("body"));
                }
            }
            if (s) sessions_[id] = s;
            ++counter_;
        }
    }

    std::optional<std::filesystem::path> dir_;
    std::uint64_t nonce_;
    std::uint64_t counter_ = 0;
    std::mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    ClassTables tables_;
};

inline void install_routes(httplib::Server& srv, SessionStore& store) {
    auto reply = [](httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_content(body.dump(), "application/json");
    };
    auto guarded = [reply](httplib::Response& res, auto&& fn) {
        try {
            fn();
        } catch (const ApiError& e) {
            reply(res, e.status, e.body);
        } catch (const json::exception& e) {
            reply(res, 400, {{"error", std::string("invalid JSON: ") + e.what()}});
        } catch (const std::exception& e) {
            reply(res, 500, {{"error", e.what()}});
        }
    };
    auto body_of = [](const httplib::Request& req) {
        if (req.body.empty()) return json::object();
        return json::parse(req.body);
    };

    srv.Post("/sessions", [&store, reply, guarded, body_of](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { reply(res, 201, store.create(body_of(req))); });
    });
    srv.Get(R"(/sessions/([0-9a-f]+))", [&store, reply, guarded](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { reply(res, 200, store.get(req.matches[1])); });
    });
    srv.Post(R"(/sessions/([0-9a-f]+)/hypothesis)",
             [&store, reply, guarded, body_of](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] { reply(res, 200, store.submit(req.matches[1], body_of(req))); });
             });
    srv.Get(R"(/sessions/([0-9a-f]+)/trace)",
            [&store, reply, guarded](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] { reply(res, 200, store.trace(req.matches[1])); });
            });
    srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.status = 204;
    });
    srv.set_error_handler([reply](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) reply(res, res.status, {{"error", "not found"}});
    });
}

}  // namespace mt
