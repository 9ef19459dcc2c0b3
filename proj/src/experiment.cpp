#include "tracelab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tracelab/bounds.hpp"
#include "tracelab/errors.hpp"
#include "tracelab/hamilton.hpp"
#include "tracelab/parallel.hpp"
#include "tracelab/rng.hpp"
#include "tracelab/spectral.hpp"
#include "tracelab/walk.hpp"

namespace tracelab {

using nlohmann::json;

namespace {

constexpr ExperimentKind kAllKinds[] = {
    ExperimentKind::cover,          ExperimentKind::strong_cover, ExperimentKind::blanket,
    ExperimentKind::visits,         ExperimentKind::return_probe, ExperimentKind::trace_hamilton,
    ExperimentKind::tau,            ExperimentKind::bounds_sweep, ExperimentKind::counterexample,
    ExperimentKind::mixing,
};

}  // namespace

std::string_view to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::cover: return "cover";
        case ExperimentKind::strong_cover: return "strong_cover";
        case ExperimentKind::blanket: return "blanket";
        case ExperimentKind::visits: return "visits";
        case ExperimentKind::return_probe: return "return_probe";
        case ExperimentKind::trace_hamilton: return "trace_hamilton";
        case ExperimentKind::tau: return "tau";
        case ExperimentKind::bounds_sweep: return "bounds_sweep";
        case ExperimentKind::counterexample: return "counterexample";
        case ExperimentKind::mixing: return "mixing";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(std::string_view tag) {
    for (ExperimentKind k : kAllKinds) {
        if (to_string(k) == tag) return k;
    }
    throw FormatError("unknown experiment \"" + std::string(tag) + "\"");
}

std::size_t LengthRule::resolve(std::size_t n) const {
    if (steps) return *steps;
    if (multiplier) {
        const double nn = static_cast<double>(n);
        return static_cast<std::size_t>(std::ceil(*multiplier * nn * std::log(nn)));
    }
    throw PreconditionError("walk length not specified");
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

void expect_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw FormatError(where + " must be a JSON object");
}

void expect_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
    expect_object(j, where);
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw FormatError("unknown field \"" + key + "\" in " + where);
        }
    }
}

template <class T>
T get_as(const json& j, const std::string& key, const std::string& where) {
    const json& v = j.at(key);
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw FormatError(where + "." + key + " must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            throw FormatError(where + "." + key + " must be a non-negative integer");
        }
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw FormatError(where + "." + key + " must be a number");
    } else {
        if (!v.is_string()) throw FormatError(where + "." + key + " must be a string");
    }
    return v.get<T>();
}

template <class T>
void read_opt(const json& j, const std::string& key, const std::string& where, T& out) {
    if (j.contains(key)) out = get_as<T>(j, key, where);
}

std::vector<double> number_list(const json& j, const std::string& key, const std::string& where) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    const json& v = j.at(key);
    if (!v.is_array()) throw FormatError(where + "." + key + " must be an array of numbers");
    for (const json& x : v) {
        if (!x.is_number()) throw FormatError(where + "." + key + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

bool randomized(ExperimentKind k) {
    return k != ExperimentKind::bounds_sweep && k != ExperimentKind::mixing;
}

bool trial_based(ExperimentKind k) {
    return k != ExperimentKind::bounds_sweep && k != ExperimentKind::mixing;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
    const std::string root = "config";
    expect_keys(doc,
                {"schema_version", "experiment", "graph", "resample_graph", "walk_length", "params", "trials",
                 "seed", "worst_start", "start", "target", "budget", "grid", "checks", "output"},
                root);
    ExperimentConfig cfg;
    if (!doc.contains("schema_version")) throw FormatError("config.schema_version is required");
    cfg.schema_version = static_cast<int>(get_as<std::uint64_t>(doc, "schema_version", root));
    if (cfg.schema_version != kConfigSchemaVersion) {
        throw FormatError("unsupported schema_version " + std::to_string(cfg.schema_version));
    }
    if (!doc.contains("experiment")) throw FormatError("config.experiment is required");
    cfg.kind = experiment_kind_from_string(get_as<std::string>(doc, "experiment", root));

    if (doc.contains("graph")) {
        const json& g = doc.at("graph");
        const std::string where = root + ".graph";
        expect_keys(g, {"family", "n", "d", "c", "seed"}, where);
        if (!g.contains("family")) throw FormatError(where + ".family is required");
        try {
            cfg.graph.family = family_from_string(get_as<std::string>(g, "family", where));
        } catch (const PreconditionError& e) {
            throw FormatError(e.what());
        }
        read_opt(g, "n", where, cfg.graph.n);
        read_opt(g, "d", where, cfg.graph.d);
        read_opt(g, "c", where, cfg.graph.c);
        read_opt(g, "seed", where, cfg.graph.seed);
        if (cfg.graph.family == Family::petersen) cfg.graph.n = 10;
    } else if (cfg.kind != ExperimentKind::bounds_sweep) {
        throw FormatError("config.graph is required for " + std::string(to_string(cfg.kind)));
    }
    read_opt(doc, "resample_graph", root, cfg.resample_graph);

    if (doc.contains("walk_length")) {
        const json& w = doc.at("walk_length");
        const std::string where = root + ".walk_length";
        expect_keys(w, {"steps", "multiplier"}, where);
        if (w.contains("steps") == w.contains("multiplier")) {
            throw FormatError(where + " needs exactly one of \"steps\" or \"multiplier\"");
        }
        if (w.contains("steps")) cfg.length.steps = get_as<std::size_t>(w, "steps", where);
        if (w.contains("multiplier")) cfg.length.multiplier = get_as<double>(w, "multiplier", where);
    }

    if (doc.contains("params")) {
        const json& p = doc.at("params");
        const std::string where = root + ".params";
        expect_keys(p, {"epsilon", "c", "c_prime", "delta", "xi", "certify_samples"}, where);
        read_opt(p, "epsilon", where, cfg.params.epsilon);
        read_opt(p, "c", where, cfg.params.c);
        read_opt(p, "c_prime", where, cfg.params.c_prime);
        read_opt(p, "delta", where, cfg.params.delta);
        read_opt(p, "xi", where, cfg.params.xi);
        read_opt(p, "certify_samples", where, cfg.params.certify_samples);
    }

    read_opt(doc, "trials", root, cfg.trials);
    if (doc.contains("seed")) {
        cfg.seed = get_as<std::uint64_t>(doc, "seed", root);
    } else if (randomized(cfg.kind)) {
        throw FormatError("config.seed is required for randomized experiments");
    }
    read_opt(doc, "worst_start", root, cfg.worst_start);
    if (doc.contains("start")) cfg.start = get_as<std::uint32_t>(doc, "start", root);
    if (doc.contains("target")) cfg.target = get_as<std::uint32_t>(doc, "target", root);
    read_opt(doc, "budget", root, cfg.budget);

    if (doc.contains("grid")) {
        const json& g = doc.at("grid");
        const std::string where = root + ".grid";
        expect_keys(g, {"n", "d", "ratio", "epsilon"}, where);
        cfg.grid.n = number_list(g, "n", where);
        cfg.grid.d = number_list(g, "d", where);
        cfg.grid.ratio = number_list(g, "ratio", where);
        cfg.grid.epsilon = number_list(g, "epsilon", where);
    }

    if (doc.contains("checks")) {
        const json& cs = doc.at("checks");
        if (!cs.is_array()) throw FormatError("config.checks must be an array");
        for (const json& c : cs) {
            const std::string where = root + ".checks[]";
            expect_keys(c, {"metric", "min", "max"}, where);
            if (!c.contains("metric")) throw FormatError(where + ".metric is required");
            Expectation e;
            e.metric = get_as<std::string>(c, "metric", where);
            if (c.contains("min")) e.min = get_as<double>(c, "min", where);
            if (c.contains("max")) e.max = get_as<double>(c, "max", where);
            cfg.checks.push_back(std::move(e));
        }
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        const std::string where = root + ".output";
        expect_keys(o, {"dir", "prefix"}, where);
        read_opt(o, "dir", where, cfg.output.dir);
        read_opt(o, "prefix", where, cfg.output.prefix);
    }
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    if (kind != ExperimentKind::bounds_sweep) {
        try {
            graph.validate();
        } catch (const PreconditionError& e) {
            throw FormatError(std::string("invalid graph: ") + e.what());
        }
    }
    if (trial_based(kind) && trials == 0) throw FormatError("trials must be positive");
    if (length.multiplier && !(*length.multiplier > 0.0)) throw FormatError("walk_length.multiplier must be positive");
    const bool needs_length = kind == ExperimentKind::strong_cover || kind == ExperimentKind::visits ||
                              kind == ExperimentKind::trace_hamilton || kind == ExperimentKind::tau;
    if (needs_length && !length.specified()) {
        throw FormatError(std::string(to_string(kind)) + " needs walk_length");
    }
    if (!(params.epsilon > 0.0)) throw FormatError("params.epsilon must be positive");
    if (!(params.c > 0.0)) throw FormatError("params.c must be positive");
    if (!(params.c_prime >= 1.0)) throw FormatError("params.c_prime must be >= 1");
    if (!(params.delta > 0.0 && params.delta < 1.0)) throw FormatError("params.delta must lie in (0, 1)");
    if (!(params.xi > 0.0 && params.xi < 1.0)) throw FormatError("params.xi must lie in (0, 1)");
    if (start && *start >= graph.n) throw FormatError("start vertex out of range");
    if (target && *target >= graph.n) throw FormatError("target vertex out of range");
    if (kind == ExperimentKind::return_probe && start && target && *start == *target) {
        throw FormatError("return_probe needs start != target");
    }
    if (kind == ExperimentKind::bounds_sweep) {
        if (grid.n.empty() || grid.d.empty() || grid.ratio.empty() || grid.epsilon.empty()) {
            throw FormatError("bounds_sweep needs non-empty grid.n, grid.d, grid.ratio, grid.epsilon");
        }
        for (double r : grid.ratio) {
            if (!(r > 1.0)) throw FormatError("grid.ratio entries must exceed 1 (lambda < d)");
        }
    }
}

json to_json(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["experiment"] = std::string(to_string(cfg.kind));
    if (cfg.kind != ExperimentKind::bounds_sweep || cfg.graph.n > 0) {
        j["graph"] = {{"family", std::string(to_string(cfg.graph.family))},
                      {"n", cfg.graph.n},
                      {"d", cfg.graph.d},
                      {"c", cfg.graph.c},
                      {"seed", cfg.graph.seed}};
    }
    j["resample_graph"] = cfg.resample_graph;
    if (cfg.length.steps) j["walk_length"] = {{"steps", *cfg.length.steps}};
    if (cfg.length.multiplier) j["walk_length"] = {{"multiplier", *cfg.length.multiplier}};
    j["params"] = {{"epsilon", cfg.params.epsilon}, {"c", cfg.params.c},
                   {"c_prime", cfg.params.c_prime}, {"delta", cfg.params.delta},
                   {"xi", cfg.params.xi},           {"certify_samples", cfg.params.certify_samples}};
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["worst_start"] = cfg.worst_start;
    if (cfg.start) j["start"] = *cfg.start;
    if (cfg.target) j["target"] = *cfg.target;
    j["budget"] = cfg.budget;
    if (cfg.kind == ExperimentKind::bounds_sweep) {
        j["grid"] = {{"n", cfg.grid.n}, {"d", cfg.grid.d}, {"ratio", cfg.grid.ratio}, {"epsilon", cfg.grid.epsilon}};
    }
    json checks = json::array();
    for (const auto& e : cfg.checks) {
        json c{{"metric", e.metric}};
        if (e.min) c["min"] = *e.min;
        if (e.max) c["max"] = *e.max;
        checks.push_back(c);
    }
    j["checks"] = checks;
    j["output"] = {{"dir", cfg.output.dir}, {"prefix", cfg.output.prefix}};
    return j;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw FormatError("cannot open config " + file.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

// ---------------------------------------------------------------------------
// Tables and statistics

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw PreconditionError("no column \"" + std::string(name) + "\"");
}

void Table::write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    }
}

std::string Table::to_csv() const {
    std::ostringstream os;
    write_csv(os);
    return os.str();
}

Table Table::parse_csv(std::istream& is) {
    Table t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ls(s);
        while (std::getline(ls, cell, ',')) out.push_back(cell);
        if (!s.empty() && s.back() == ',') out.emplace_back();
        return out;
    };
    if (!std::getline(is, line)) throw FormatError("empty CSV");
    t.columns = split(line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto row = split(line);
        if (row.size() != t.columns.size()) throw FormatError("CSV row has wrong number of cells");
        t.rows.push_back(std::move(row));
    }
    return t;
}

namespace {

double parse_double(const std::string& s) {
    double x = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw FormatError("not a number: \"" + s + "\"");
    return x;
}

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

json summarize(const Table& table, std::string_view metric, std::string_view censor_column) {
    const std::size_t m = table.column(metric);
    const std::optional<std::size_t> cc =
        censor_column.empty() ? std::nullopt : std::optional<std::size_t>(table.column(censor_column));
    std::vector<double> values;
    std::size_t censored = 0;
    for (const auto& row : table.rows) {
        if (cc && row[*cc] == "1") {
            ++censored;
            continue;
        }
        if (row[m].empty()) continue;
        values.push_back(parse_double(row[m]));
    }
    json s;
    s["metric"] = std::string(metric);
    s["rows"] = table.rows.size();
    s["count"] = values.size();
    s["censored"] = censored;
    s["censoring_rate"] = table.rows.empty() ? 0.0 : static_cast<double>(censored) / static_cast<double>(table.rows.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = values.empty() ? 0.0 : sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    s["mean"] = mean;
    s["stderr"] = values.empty() ? 0.0 : sd / std::sqrt(static_cast<double>(values.size()));
    s["min"] = sorted.empty() ? 0.0 : sorted.front();
    s["max"] = sorted.empty() ? 0.0 : sorted.back();
    s["q05"] = quantile(sorted, 0.05);
    s["q50"] = quantile(sorted, 0.50);
    s["q95"] = quantile(sorted, 0.95);
    return s;
}

json ExperimentResult::summary_document() const {
    return {{"version", version},
            {"config", to_json(config)},
            {"metric", metric},
            {"censor_column", censor_column},
            {"statistics", summary.at("statistics")},
            {"derived", summary.value("derived", json::object())},
            {"wall_seconds", wall_seconds}};
}

// ---------------------------------------------------------------------------
// Runners

namespace {

std::string num(std::size_t x) { return std::to_string(x); }
std::string flag(bool b) { return b ? "1" : "0"; }
std::string opt_num(const std::optional<std::size_t>& x) { return x ? num(*x) : ""; }

double n_log_n(std::size_t n) {
    const double nn = static_cast<double>(n);
    return nn * std::log(nn);
}

const std::vector<std::string> kWalkColumns = {"trial", "start", "seed", "cover_step", "blanket_t", "rho_hat", "censored"};

struct Runner {
    const ExperimentConfig& cfg;
    RunOptions opts;
    ExperimentResult res;

    Runner(const ExperimentConfig& c, const RunOptions& o) : cfg(c), opts(o) { res.config = c; }

    Graph base_graph() const { return generate(cfg.graph); }

    json& derived() { return res.summary["derived"]; }

    void cover(bool counterexample) {
        const Graph g = base_graph();
        CoverOptions co;
        co.trials = cfg.trials;
        co.seed = cfg.seed;
        co.worst_start = cfg.worst_start;
        if (!cfg.worst_start && cfg.start) co.start = *cfg.start;
        co.budget = cfg.budget;
        co.workers = opts.workers;
        const auto stats = cover_time_empirical(g, co);
        res.trials.columns = kWalkColumns;
        for (const auto& r : stats.records) {
            res.trials.rows.push_back({num(r.trial), num(r.start), num(r.seed), opt_num(r.cover_step), "", "",
                                       flag(r.censored())});
        }
        res.metric = "cover_step";
        res.censor_column = "censored";
        const std::size_t n = g.num_vertices();
        derived()["n"] = n;
        derived()["n_log_n"] = n_log_n(n);
        derived()["budget"] = cfg.budget ? cfg.budget : default_cover_budget(n);
        if (cfg.worst_start) {
            derived()["worst_start_mean"] = stats.worst_start_mean;
            derived()["worst_start"] = stats.worst_start;
            derived()["starts"] = stats.starts.size();
        }
        if (counterexample) {
            const double threshold = 2.0 * n_log_n(n);
            derived()["threshold_2_n_log_n"] = threshold;
            derived()["meets_threshold"] = stats.mean >= threshold;
            const double c = static_cast<double>(cfg.graph.c);
            const CertifyMode mode =
                n <= 24 ? CertifyMode::exhaustive() : CertifyMode::sampled(1000, derive_seed(cfg.seed, 7));
            const auto v = certify_expander(g, c, mode);
            derived()["certification"] = {{"c", c},
                                          {"mode", mode.exact ? "exact" : "sampled"},
                                          {"expansion", v.expansion_pass.value_or(true)},
                                          {"joinedness", v.joinedness_pass.value_or(true)}};
        }
    }

    void strong_cover() {
        const Graph g = base_graph();
        const std::size_t length = cfg.length.resolve(g.num_vertices());
        const auto r = strong_cover_estimate(g, length, cfg.trials, cfg.seed, opts.workers);
        res.trials.columns = kWalkColumns;
        res.trials.columns.push_back("covered");
        for (const auto& t : r.records) {
            res.trials.rows.push_back(
                {num(t.trial), num(t.start), num(t.seed), opt_num(t.cover_step), "", "", flag(t.censored()), flag(!t.censored())});
        }
        res.metric = "covered";
        derived()["length"] = length;
        derived()["fraction"] = r.fraction;
    }

    void blanket() {
        const Graph g = base_graph();
        const std::size_t n = g.num_vertices();
        const std::size_t budget = cfg.length.specified()
                                       ? cfg.length.resolve(n)
                                       : static_cast<std::size_t>(std::ceil(3.0 * n_log_n(n)));
        const auto starts = trial_starts(n, cfg.trials, cfg.seed, cfg.start);
        std::vector<BlanketResult> out(cfg.trials);
        parallel_for(cfg.trials, opts.workers, [&](std::size_t i) {
            out[i] = blanket_time(g, starts[i], cfg.params.delta, derive_seed(cfg.seed, i), budget);
        });
        res.trials.columns = kWalkColumns;
        for (std::size_t i = 0; i < cfg.trials; ++i) {
            res.trials.rows.push_back({num(i), num(starts[i]), num(derive_seed(cfg.seed, i)), opt_num(out[i].cover_step),
                                       opt_num(out[i].blanket_step), "", flag(out[i].censored())});
        }
        res.metric = "blanket_t";
        res.censor_column = "censored";
        derived()["budget"] = budget;
        derived()["delta"] = cfg.params.delta;
    }

    void visits() {
        const Graph g = base_graph();
        const std::size_t n = g.num_vertices();
        const std::size_t length = cfg.length.resolve(n);
        const Vertex target = cfg.target ? *cfg.target : static_cast<Vertex>(n - 1);
        const auto rep = segmented_visit_experiment(g, length, cfg.params.c, cfg.trials, cfg.seed, target, opts.workers);
        res.trials.columns = kWalkColumns;
        res.trials.columns.push_back("segments");
        res.trials.columns.push_back("segments_hit");
        for (const auto& t : rep.records) {
            res.trials.rows.push_back({num(t.trial), num(t.start), num(t.seed), "", "", format_number(t.rho_hat), "0",
                                       num(t.segments), num(t.segments_hit)});
        }
        res.metric = "rho_hat";
        derived()["length"] = length;
        derived()["segment_length"] = rep.segment_length;
        derived()["target"] = target;
        derived()["hit_frequency"] = rep.hit_frequency;
        derived()["rho_median"] = rep.rho_median;
        derived()["rho_median_ci"] = {rep.rho_median_ci_low, rep.rho_median_ci_high};
        derived()["reference_hit_probability"] = 0.5 / std::sqrt(cfg.params.c);
    }

    void return_probe_run() {
        const Graph g = base_graph();
        const std::size_t n = g.num_vertices();
        const Vertex u = cfg.start ? *cfg.start : 0;
        const Vertex v = cfg.target ? *cfg.target : static_cast<Vertex>(n - 1);
        const std::size_t horizon = cfg.length.specified() ? cfg.length.resolve(n) : default_probe_horizon(n, cfg.params.c);
        const auto r = return_probe(g, u, v, horizon, cfg.trials, cfg.seed, 0.99, opts.workers);
        res.trials.columns = {"trial", "start", "target", "seed", "hit"};
        for (std::size_t i = 0; i < cfg.trials; ++i) {
            res.trials.rows.push_back({num(i), num(u), num(v), num(derive_seed(cfg.seed, i)), flag(r.hit_by_trial[i] != 0)});
        }
        res.metric = "hit";
        derived()["horizon"] = horizon;
        derived()["estimate"] = r.estimate;
        derived()["ci99_low"] = r.ci_low;
        derived()["ci99_high"] = r.ci_high;
        derived()["reference"] = 1.0 / std::sqrt(cfg.params.c);
    }

    Graph trial_graph(std::size_t i, std::uint64_t& graph_seed) const {
        GenSpec spec = cfg.graph;
        if (cfg.resample_graph) spec.seed = derive_seed(cfg.graph.seed, i);
        graph_seed = spec.seed;
        return generate(spec);
    }

    void trace_hamilton() {
        struct Row {
            std::uint64_t graph_seed = 0, walk_seed = 0;
            Vertex start = 0;
            std::size_t length = 0, edges = 0, restarts = 0, work = 0;
            bool covered = false;
            CycleStatus status = CycleStatus::budget_exhausted;
            double certified_c = 0.0;
        };
        std::vector<Row> rows(cfg.trials);
        std::optional<Graph> shared;
        if (!cfg.resample_graph) shared = base_graph();
        parallel_for(cfg.trials, opts.workers, [&](std::size_t i) {
            Row& row = rows[i];
            const Graph g = shared ? *shared : trial_graph(i, row.graph_seed);
            if (shared) row.graph_seed = cfg.graph.seed;
            const std::size_t n = g.num_vertices();
            row.walk_seed = derive_seed(cfg.seed, i);
            Rng pick(derive_seed(row.walk_seed, 1));
            row.start = cfg.start ? *cfg.start : static_cast<Vertex>(pick.below(n));
            row.length = cfg.length.resolve(n);
            const WalkTrace trace = simulate_walk(g, row.start, row.length, row.walk_seed);
            row.covered = trace.cover_step.has_value();
            const Graph gamma = trace_graph(trace, g);
            row.edges = gamma.num_edges();
            const auto cyc = hamiltonian_posa(gamma, derive_seed(row.walk_seed, 2));
            row.status = cyc.status;
            row.restarts = cyc.restarts;
            row.work = cyc.work;
            if (cfg.params.certify_samples > 0) {
                for (double c : {2.0, 4.0, 8.0}) {
                    const auto v = certify_expander(gamma, c, CertifyMode::sampled(cfg.params.certify_samples,
                                                                                    derive_seed(row.walk_seed, 3)));
                    if (!v.passed()) break;
                    row.certified_c = c;
                }
            }
        });
        res.trials.columns = {"trial", "graph_seed", "walk_seed", "start", "length", "covered", "trace_edges",
                              "status", "found", "restarts", "rotations", "certified_c"};
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Row& r = rows[i];
            res.trials.rows.push_back({num(i), num(r.graph_seed), num(r.walk_seed), num(r.start), num(r.length),
                                       flag(r.covered), num(r.edges), std::string(to_string(r.status)),
                                       flag(r.status == CycleStatus::found), num(r.restarts), num(r.work),
                                       format_number(r.certified_c)});
        }
        res.metric = "found";
        std::size_t found = 0, uncovered = 0;
        for (const Row& r : rows) {
            found += r.status == CycleStatus::found;
            uncovered += !r.covered;
        }
        derived()["success_fraction"] = static_cast<double>(found) / static_cast<double>(rows.size());
        derived()["uncovered_fraction"] = static_cast<double>(uncovered) / static_cast<double>(rows.size());
    }

    void tau() {
        struct Row {
            std::uint64_t graph_seed = 0, walk_seed = 0;
            Vertex start = 0;
            TauResult tau;
        };
        std::vector<Row> rows(cfg.trials);
        std::optional<Graph> shared;
        if (!cfg.resample_graph) shared = base_graph();
        parallel_for(cfg.trials, opts.workers, [&](std::size_t i) {
            Row& row = rows[i];
            const Graph g = shared ? *shared : trial_graph(i, row.graph_seed);
            if (shared) row.graph_seed = cfg.graph.seed;
            row.walk_seed = derive_seed(cfg.seed, i);
            Rng pick(derive_seed(row.walk_seed, 1));
            row.start = cfg.start ? *cfg.start : static_cast<Vertex>(pick.below(g.num_vertices()));
            row.tau = tau_times(g, row.start, cfg.length.resolve(g.num_vertices()), row.walk_seed);
        });
        res.trials.columns = {"trial", "graph_seed", "walk_seed", "start", "tau_1", "tau_2", "tau_hc", "gap", "exact", "censored"};
        std::size_t gap_one = 0, uncensored = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Row& r = rows[i];
            std::string gap;
            if (r.tau.tau_hc && r.tau.tau_1) {
                gap = num(*r.tau.tau_hc - *r.tau.tau_1);
                ++uncensored;
                gap_one += (*r.tau.tau_hc - *r.tau.tau_1) == 1;
            }
            res.trials.rows.push_back({num(i), num(r.graph_seed), num(r.walk_seed), num(r.start), opt_num(r.tau.tau_1),
                                       opt_num(r.tau.tau_2), opt_num(r.tau.tau_hc), gap, flag(r.tau.exact),
                                       flag(r.tau.censored())});
        }
        res.metric = "gap";
        res.censor_column = "censored";
        derived()["fraction_gap_one"] = uncensored ? static_cast<double>(gap_one) / static_cast<double>(uncensored) : 0.0;
    }

    void bounds_sweep() {
        res.trials.columns = {"n", "d", "lambda", "eps", "h_lower", "h_upper", "cover_upper", "hitting_band", "cover_band"};
        for (double n : cfg.grid.n) {
            for (double d : cfg.grid.d) {
                for (double ratio : cfg.grid.ratio) {
                    for (double eps : cfg.grid.epsilon) {
                        const double lambda = d / ratio;
                        const auto b = cover_time_spectral_bound(n, d, lambda, eps);
                        res.trials.rows.push_back({format_number(n), format_number(d), format_number(lambda),
                                                   format_number(eps), format_number(b.h_lower), format_number(b.h_upper),
                                                   format_number(b.cover_upper), flag(b.hitting_band_holds),
                                                   flag(b.cover_band_holds)});
                    }
                }
            }
        }
        res.metric = "cover_upper";
    }

    void mixing() {
        const Graph g = base_graph();
        const std::size_t n = g.num_vertices();
        const auto spec = eigen_extremes(g);
        const std::size_t tau = empirical_mixing_time(g, cfg.params.xi);
        const auto profile = worst_start_tv_profile(g, tau + 5);
        res.trials.columns = {"t", "tv"};
        for (std::size_t t = 0; t < profile.size(); ++t) res.trials.rows.push_back({num(t), format_number(profile[t])});
        res.metric = "tv";
        bool monotone = true;
        for (std::size_t t = 1; t < profile.size(); ++t) monotone = monotone && profile[t] <= profile[t - 1] + 1e-12;
        derived()["lambda"] = spec.lambda;
        derived()["xi"] = cfg.params.xi;
        derived()["mixing_time"] = tau;
        if (spec.lambda < spec.d) {
            const double bound = mixing_time_bound(static_cast<double>(n), spec.d, spec.lambda, cfg.params.xi);
            derived()["bound"] = bound;
            derived()["within_bound"] = static_cast<double>(tau) <= std::ceil(bound);
        }
        derived()["monotone"] = monotone;
    }
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    Runner run(cfg, opts);
    run.res.summary = json{{"derived", json::object()}};
    switch (cfg.kind) {
        case ExperimentKind::cover: run.cover(false); break;
        case ExperimentKind::counterexample: run.cover(true); break;
        case ExperimentKind::strong_cover: run.strong_cover(); break;
        case ExperimentKind::blanket: run.blanket(); break;
        case ExperimentKind::visits: run.visits(); break;
        case ExperimentKind::return_probe: run.return_probe_run(); break;
        case ExperimentKind::trace_hamilton: run.trace_hamilton(); break;
        case ExperimentKind::tau: run.tau(); break;
        case ExperimentKind::bounds_sweep: run.bounds_sweep(); break;
        case ExperimentKind::mixing: run.mixing(); break;
    }
    run.res.summary["statistics"] = summarize(run.res.trials, run.res.metric, run.res.censor_column);
    run.res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::move(run.res);
}

PersistedFiles persist(const ExperimentResult& res, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::string prefix = res.config.output.prefix.empty() ? std::string(to_string(res.config.kind))
                                                                : res.config.output.prefix;
    PersistedFiles files{dir / (prefix + "_trials.csv"), dir / (prefix + "_summary.json")};
    {
        std::ofstream out(files.trials_csv, std::ios::binary);
        res.trials.write_csv(out);
        if (!out) throw std::runtime_error("failed to write " + files.trials_csv.string());
    }
    {
        std::ofstream out(files.summary_json, std::ios::binary);
        out << res.summary_document().dump(2) << '\n';
        if (!out) throw std::runtime_error("failed to write " + files.summary_json.string());
    }
    return files;
}

std::vector<CheckOutcome> evaluate_checks(const ExperimentResult& res) {
    const json doc = res.summary_document();
    std::vector<CheckOutcome> out;
    for (const auto& e : res.config.checks) {
        CheckOutcome c{e, std::nullopt, false};
        const json* node = &doc;
        std::istringstream path(e.metric);
        std::string part;
        while (node && std::getline(path, part, '.')) {
            node = node->is_object() && node->contains(part) ? &node->at(part) : nullptr;
        }
        if (node && (node->is_number() || node->is_boolean())) {
            c.value = node->is_boolean() ? (node->get<bool>() ? 1.0 : 0.0) : node->get<double>();
            c.passed = (!e.min || *c.value >= *e.min) && (!e.max || *c.value <= *e.max);
        }
        out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plot data

std::string_view to_string(PlotKind k) {
    switch (k) {
        case PlotKind::histogram: return "histogram";
        case PlotKind::series: return "series";
        case PlotKind::tv_profile: return "tv_profile";
        case PlotKind::cover_vs_n: return "cover_vs_n";
        case PlotKind::success_vs_multiplier: return "success_vs_multiplier";
    }
    return "unknown";
}

PlotKind plot_kind_from_string(std::string_view tag) {
    for (PlotKind k : {PlotKind::histogram, PlotKind::series, PlotKind::tv_profile, PlotKind::cover_vs_n,
                       PlotKind::success_vs_multiplier}) {
        if (to_string(k) == tag) return k;
    }
    throw PreconditionError("unknown plot kind \"" + std::string(tag) + "\"");
}

namespace {

std::vector<double> metric_values(const ExperimentResult& r) {
    const std::size_t m = r.trials.column(r.metric);
    const std::optional<std::size_t> cc =
        r.censor_column.empty() ? std::nullopt : std::optional<std::size_t>(r.trials.column(r.censor_column));
    std::vector<double> out;
    for (const auto& row : r.trials.rows) {
        if ((cc && row[*cc] == "1") || row[m].empty()) continue;
        out.push_back(parse_double(row[m]));
    }
    return out;
}

std::filesystem::path write_table(const Table& t, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    t.write_csv(out);
    if (!out) throw std::runtime_error("failed to write " + file.string());
    return file;
}

Table histogram_table(const std::vector<double>& values) {
    Table t{{"x", "y"}, {}};
    if (values.empty()) return t;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    const bool integral = std::all_of(values.begin(), values.end(), [](double v) { return v == std::floor(v); });
    if (integral && hi - lo <= 200) {
        std::map<double, std::size_t> counts;
        for (double v : values) ++counts[v];
        for (double x = lo; x <= hi; x += 1.0) {
            t.rows.push_back({format_number(x), std::to_string(counts.count(x) ? counts[x] : 0)});
        }
        return t;
    }
    constexpr std::size_t bins = 20;
    const double width = hi > lo ? (hi - lo) / bins : 1.0;
    std::vector<std::size_t> counts(bins, 0);
    for (double v : values) {
        const auto b = std::min(bins - 1, static_cast<std::size_t>((v - lo) / width));
        ++counts[b];
    }
    for (std::size_t b = 0; b < bins; ++b) {
        t.rows.push_back({format_number(lo + (static_cast<double>(b) + 0.5) * width), std::to_string(counts[b])});
    }
    return t;
}

}  // namespace

std::vector<std::filesystem::path> emit_plot_data(std::span<const ExperimentResult> results, PlotKind kind,
                                                  const std::filesystem::path& dir, std::string_view prefix) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> files;
    const std::string base = std::string(prefix) + "_" + std::string(to_string(kind));
    auto indexed = [&](std::size_t i) {
        return dir / (results.size() == 1 ? base + ".csv" : base + "_" + std::to_string(i) + ".csv");
    };
    switch (kind) {
        case PlotKind::histogram:
            for (std::size_t i = 0; i < results.size(); ++i) {
                files.push_back(write_table(histogram_table(metric_values(results[i])), indexed(i)));
            }
            break;
        case PlotKind::series:
            for (std::size_t i = 0; i < results.size(); ++i) {
                Table t{{"x", "y"}, {}};
                const auto v = metric_values(results[i]);
                for (std::size_t k = 0; k < v.size(); ++k) t.rows.push_back({std::to_string(k), format_number(v[k])});
                files.push_back(write_table(t, indexed(i)));
            }
            break;
        case PlotKind::tv_profile:
            for (std::size_t i = 0; i < results.size(); ++i) {
                const auto& r = results[i];
                if (r.config.kind != ExperimentKind::mixing) {
                    throw PreconditionError("tv_profile plots need a mixing experiment");
                }
                Table t{{"x", "y"}, {}};
                for (const auto& row : r.trials.rows) t.rows.push_back({row[0], row[1]});
                files.push_back(write_table(t, indexed(i)));
            }
            break;
        case PlotKind::cover_vs_n: {
            Table t{{"x", "y", "ci_low", "ci_high"}, {}};
            for (const auto& r : results) {
                const auto& s = r.summary.at("statistics");
                const double mean = s.at("mean").get<double>(), se = s.at("stderr").get<double>();
                t.rows.push_back({std::to_string(r.config.graph.n), format_number(mean), format_number(mean - 1.96 * se),
                                  format_number(mean + 1.96 * se)});
            }
            files.push_back(write_table(t, dir / (base + ".csv")));
            break;
        }
        case PlotKind::success_vs_multiplier: {
            Table t{{"x", "y", "ci_low", "ci_high"}, {}};
            for (const auto& r : results) {
                const auto v = metric_values(r);
                std::size_t successes = 0;
                for (double x : v) successes += x != 0.0;
                const auto [lo, hi] = clopper_pearson(successes, v.size(), 0.95);
                const double x = r.config.length.multiplier ? *r.config.length.multiplier
                                                            : static_cast<double>(r.config.length.steps.value_or(0));
                const double frac = v.empty() ? 0.0 : static_cast<double>(successes) / static_cast<double>(v.size());
                t.rows.push_back({format_number(x), format_number(frac), format_number(lo), format_number(hi)});
            }
            files.push_back(write_table(t, dir / (base + ".csv")));
            break;
        }
    }
    return files;
}

}  // namespace tracelab
