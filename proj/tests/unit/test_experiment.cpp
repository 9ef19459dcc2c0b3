#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "tracelab/errors.hpp"
#include "tracelab/experiment.hpp"

using namespace tracelab;
using nlohmann::json;

namespace {

json base_cover() {
    return json::parse(R"({
        "schema_version": 1,
        "experiment": "cover",
        "graph": {"family": "complete", "n": 20},
        "trials": 200,
        "seed": 5
    })");
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("tracelab_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config parsing is strict") {
    CHECK_NOTHROW(parse_config(base_cover()));

    auto typo = base_cover();
    typo["trails"] = 10;
    CHECK_THROWS_AS(parse_config(typo), FormatError);

    auto nested = base_cover();
    nested["graph"]["degree"] = 3;
    CHECK_THROWS_AS(parse_config(nested), FormatError);

    auto no_seed = base_cover();
    no_seed.erase("seed");
    CHECK_THROWS_AS(parse_config(no_seed), FormatError);

    auto bad_version = base_cover();
    bad_version["schema_version"] = 2;
    CHECK_THROWS_AS(parse_config(bad_version), FormatError);

    auto bad_kind = base_cover();
    bad_kind["experiment"] = "coverage";
    CHECK_THROWS_AS(parse_config(bad_kind), FormatError);

    auto bad_type = base_cover();
    bad_type["trials"] = "many";
    CHECK_THROWS_AS(parse_config(bad_type), FormatError);

    auto bad_mult = base_cover();
    bad_mult["walk_length"] = {{"multiplier", -1.0}};
    CHECK_THROWS_AS(parse_config(bad_mult), FormatError);

    auto both = base_cover();
    both["walk_length"] = {{"multiplier", 1.0}, {"steps", 10}};
    CHECK_THROWS_AS(parse_config(both), FormatError);

    auto bad_graph = base_cover();
    bad_graph["graph"] = {{"family", "random_regular"}, {"n", 5}, {"d", 3}};
    CHECK_THROWS_AS(parse_config(bad_graph), FormatError);

    auto needs_length = base_cover();
    needs_length["experiment"] = "strong_cover";
    CHECK_THROWS_AS(parse_config(needs_length), FormatError);
}

TEST_CASE("config echo round trips") {
    auto j = base_cover();
    j["walk_length"] = {{"multiplier", 1.5}};
    j["checks"] = json::array({{{"metric", "statistics.mean"}, {"min", 1.0}}});
    const auto cfg = parse_config(j);
    const auto again = parse_config(to_json(cfg));
    CHECK(to_json(again) == to_json(cfg));
    CHECK(again.length.resolve(100) == static_cast<std::size_t>(std::ceil(1.5 * 100 * std::log(100.0))));
}

TEST_CASE("cover experiment: summary is re-derivable from the CSV") {
    const auto res = run_experiment(parse_config(base_cover()));
    CHECK(res.trials.rows.size() == 200);
    CHECK(res.trials.columns ==
          std::vector<std::string>{"trial", "start", "seed", "cover_step", "blanket_t", "rho_hat", "censored"});
    std::istringstream csv(res.trials.to_csv());
    const Table back = Table::parse_csv(csv);
    CHECK(summarize(back, res.metric, res.censor_column) == res.summary.at("statistics"));
    const double mean = res.summary.at("statistics").at("mean").get<double>();
    CHECK(mean == doctest::Approx(19 * oracle::harmonic(19)).epsilon(0.1));
}

TEST_CASE("per-trial CSV is identical across runs and worker counts") {
    std::vector<json> configs;
    configs.push_back(base_cover());
    configs.push_back(json::parse(R"({"schema_version":1,"experiment":"trace_hamilton",
        "graph":{"family":"random_regular","n":40,"d":6,"seed":3},"resample_graph":true,
        "walk_length":{"multiplier":1.5},"trials":6,"seed":2})"));
    configs.push_back(json::parse(R"({"schema_version":1,"experiment":"visits",
        "graph":{"family":"random_regular","n":60,"d":6,"seed":3},
        "walk_length":{"multiplier":2},"params":{"c":16},"trials":10,"seed":2})"));
    configs.push_back(json::parse(R"({"schema_version":1,"experiment":"tau",
        "graph":{"family":"random_regular","n":20,"d":4,"seed":3},"resample_graph":true,
        "walk_length":{"steps":2000},"trials":6,"seed":8})"));
    configs.push_back(json::parse(R"({"schema_version":1,"experiment":"blanket",
        "graph":{"family":"random_regular","n":30,"d":4,"seed":1},"trials":20,"seed":4})"));
    configs.push_back(json::parse(R"({"schema_version":1,"experiment":"return_probe",
        "graph":{"family":"random_regular","n":64,"d":8,"seed":1},"params":{"c":16},"trials":500,"seed":4})"));
    for (const auto& j : configs) {
        const auto cfg = parse_config(j);
        const auto a = run_experiment(cfg, {1});
        const auto b = run_experiment(cfg, {1});
        const auto c = run_experiment(cfg, {8});
        CHECK(a.trials.to_csv() == b.trials.to_csv());
        CHECK(a.trials.to_csv() == c.trials.to_csv());
        CHECK(a.summary == c.summary);
    }
}

TEST_CASE("persist writes the CSV and a summary carrying the config echo") {
    auto cfg = parse_config(base_cover());
    cfg.output.prefix = "k20";
    const auto res = run_experiment(cfg);
    const auto dir = scratch("persist");
    const auto files = persist(res, dir);
    CHECK(files.trials_csv.filename() == "k20_trials.csv");
    CHECK(slurp(files.trials_csv) == res.trials.to_csv());
    const json doc = json::parse(slurp(files.summary_json));
    CHECK(doc.at("version") == std::string(kVersionStamp));
    const auto replay = run_experiment(parse_config(doc.at("config")));
    CHECK(replay.trials.to_csv() == res.trials.to_csv());
    std::ifstream in(files.trials_csv);
    CHECK(summarize(Table::parse_csv(in), doc.at("metric").get<std::string>(), doc.at("censor_column").get<std::string>()) ==
          doc.at("statistics"));
}

TEST_CASE("checks evaluate dotted paths") {
    auto j = base_cover();
    j["checks"] = json::array({{{"metric", "statistics.mean"}, {"min", 1.0}, {"max", 1e6}},
                               {{"metric", "statistics.mean"}, {"max", 1.0}},
                               {{"metric", "derived.nothing"}, {"min", 0.0}}});
    const auto out = evaluate_checks(run_experiment(parse_config(j)));
    REQUIRE(out.size() == 3);
    CHECK(out[0].passed);
    CHECK_FALSE(out[1].passed);
    CHECK_FALSE(out[2].passed);
    CHECK_FALSE(out[2].value.has_value());
}

TEST_CASE("bounds sweep grid") {
    const auto cfg = parse_config(json::parse(R"({"schema_version":1,"experiment":"bounds_sweep",
        "grid":{"n":[1000],"d":[100],"ratio":[2,10,100],"epsilon":[0.1]}})"));
    const auto res = run_experiment(cfg);
    REQUIRE(res.trials.rows.size() == 3);
    CHECK(res.trials.columns[0] == "n");
    CHECK(res.trials.columns[6] == "cover_upper");
    // tighter ratio, tighter sandwich
    const auto h_up = res.trials.column("h_upper");
    CHECK(std::stod(res.trials.rows[0][h_up]) > std::stod(res.trials.rows[2][h_up]));
}

TEST_CASE("counterexample experiment reports certification") {
    const auto cfg = parse_config(json::parse(R"({"schema_version":1,"experiment":"counterexample",
        "graph":{"family":"counterexample","n":20,"c":3},"trials":200,"seed":1})"));
    const auto res = run_experiment(cfg);
    const auto& d = res.summary.at("derived");
    CHECK(d.at("certification").at("mode") == "exact");
    CHECK(d.at("certification").at("expansion") == true);
    CHECK(d.at("certification").at("joinedness") == true);
}

TEST_CASE("plot data") {
    const auto dir = scratch("plots");
    const auto mixing = run_experiment(parse_config(json::parse(R"({"schema_version":1,"experiment":"mixing",
        "graph":{"family":"complete","n":10},"params":{"xi":0.01}})")));
    const auto files = emit_plot_data({&mixing, 1}, PlotKind::tv_profile, dir, "k10");
    REQUIRE(files.size() == 1);
    std::ifstream in(files[0]);
    const Table t = Table::parse_csv(in);
    CHECK(t.columns == std::vector<std::string>{"x", "y"});
    CHECK(t.rows[0][0] == "0");
    for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(std::stod(t.rows[i][1]) <= std::stod(t.rows[i - 1][1]));

    std::vector<ExperimentResult> covers;
    for (std::size_t n = 10; n <= 30; n += 10) {
        auto j = base_cover();
        j["graph"]["n"] = n;
        j["trials"] = 2000;
        covers.push_back(run_experiment(parse_config(j)));
    }
    const auto curve = emit_plot_data(covers, PlotKind::cover_vs_n, dir, "kn");
    std::ifstream cin_(curve[0]);
    const Table c = Table::parse_csv(cin_);
    REQUIRE(c.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const double n = std::stod(c.rows[i][0]);
        const double target = (n - 1) * oracle::harmonic(static_cast<std::size_t>(n) - 1);
        CHECK(std::stod(c.rows[i][1]) == doctest::Approx(target).epsilon(0.05));
        CHECK(std::stod(c.rows[i][2]) <= std::stod(c.rows[i][1]));
    }

    const auto hist = emit_plot_data({&covers[0], 1}, PlotKind::histogram, dir, "hist");
    CHECK(std::filesystem::exists(hist[0]));
    CHECK_THROWS_AS(plot_kind_from_string("scatter"), PreconditionError);
    CHECK_THROWS_AS(emit_plot_data({&covers[0], 1}, PlotKind::tv_profile, dir, "x"), PreconditionError);
}

TEST_CASE("format_number round trips") {
    for (double x : {0.1, 1.0 / 3.0, 219.48106157814175, 1e-300, 12345678.0}) {
        CHECK(std::stod(format_number(x)) == x);
    }
    CHECK(format_number(3.0) == "3");
}

}  // TEST_SUITE
