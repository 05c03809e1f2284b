#pragma once

#include <boost/dynamic_bitset.hpp>
#include <json.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mt {

using json = nlohmann::json;
using Bits = boost::dynamic_bitset<std::uint64_t>;

// A grid cell (2-Rec) or lattice node (Lattice). x is the column / first coordinate.
struct Cell {
    int x = 0;
    int y = 0;
    auto operator<=>(const Cell&) const = default;
};

inline int l1(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

struct LabeledExample {
    Cell at;
    bool label = true;
    bool operator==(const LabeledExample&) const = default;
};

// Lower keys are more preferred. Equal keys are genuine ties.
struct PreferenceKey {
    int tier = 0;
    int dist = 0;
    long subkey = 0;
    auto operator<=>(const PreferenceKey&) const = default;
};

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ForbiddenExample : DomainError {
    using DomainError::DomainError;
};
struct InconsistentTeaching : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Unsupported : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// splitmix64 finalizer, used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t seed_of(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                             std::uint64_t c = 0) {
    return mix64(mix64(mix64(master ^ mix64(a)) ^ b) ^ c);
}

inline std::uint64_t seed_of(std::uint64_t master, const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char ch : s) h = (h ^ ch) * 1099511628211ULL;
    return seed_of(master, h);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : eng_(seed) {}
    std::size_t index(std::size_t n) {
        if (n == 0) throw DomainError("Rng::index on empty range");
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_);
    }
    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

struct TieBreak {
    enum class Mode { SeededRandom, Adversarial };
    Mode mode = Mode::SeededRandom;
    std::uint64_t seed = 0;
    static TieBreak seeded(std::uint64_t s) { return {Mode::SeededRandom, s}; }
    static TieBreak adversarial() { return {Mode::Adversarial, 0}; }
};

struct NoiseModel {
    double epsilon = 0.0;
};

enum class Terminal { Running, ReachedTarget, BudgetExhausted };

inline std::string to_string(Terminal t) {
    switch (t) {
        case Terminal::ReachedTarget: return "reached";
        case Terminal::BudgetExhausted: return "exhausted";
        default: return "running";
    }
}

struct TraceStep {
    int t = 0;
    LabeledExample example;
    json learner;
    std::optional<long> vs_size;
};

struct TeachingTrace {
    std::vector<TraceStep> steps;
    Terminal terminal = Terminal::Running;
};

inline json example_json(const LabeledExample& z) {
    return {{"x", z.at.x}, {"y", z.at.y}, {"label", z.label ? 1 : 0}};
}

inline LabeledExample example_from_json(const json& j) {
    int label = j.at("label").get<int>();
    if (label != 0 && label != 1) throw DomainError("label must be 0 or 1");
    return {{j.at("x").get<int>(), j.at("y").get<int>()}, label == 1};
}

inline json step_json(const TraceStep& s) {
    json j;
    j["t"] = s.t;
    j["example"] = example_json(s.example);
    j["learner"] = s.learner;
    j["vs_size"] = s.vs_size ? json(*s.vs_size) : json(nullptr);
    return j;
}

inline TraceStep step_from_json(const json& j) {
    TraceStep s;
    s.t = j.at("t").get<int>();
    s.example = example_from_json(j.at("example"));
    s.learner = j.at("learner");
    if (!j.at("vs_size").is_null()) s.vs_size = j.at("vs_size").get<long>();
    return s;
}

inline std::string trace_jsonl(const TeachingTrace& tr) {
    std::string out;
    for (const auto& s : tr.steps) out += step_json(s).dump() + "\n";
    return out;
}

inline std::vector<TraceStep> steps_from_jsonl(const std::string& text) {
    std::vector<TraceStep> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        if (end > pos) out.push_back(step_from_json(json::parse(text.substr(pos, end - pos))));
        pos = end + 1;
    }
    return out;
}

// Explicit version space helpers over dense hypothesis ids.
inline std::vector<std::size_t> members(const Bits& b) {
    std::vector<std::size_t> out;
    out.reserve(b.count());
    for (auto i = b.find_first(); i != Bits::npos; i = b.find_next(i)) out.push_back(i);
    return out;
}

inline std::size_t nth_member(const Bits& b, std::size_t k) {
    auto i = b.find_first();
    while (k-- > 0) i = b.find_next(i);
    return i;
}

}  // namespace mt
