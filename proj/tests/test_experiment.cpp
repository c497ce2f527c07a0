#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "subscan/error.hpp"
#include "subscan/experiment.hpp"
#include "subscan/net.hpp"
#include "subscan/theory.hpp"

using namespace subscan;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.M = 30;
    cfg.N = 20;
    cfg.sizes = {{4, 5}, {6, 3}};
    cfg.B = 19;
    cfg.reps = 2;
    cfg.multipliers = {0.5, 1.5};
    cfg.restarts = 2;
    cfg.timing = false;
    cfg.threads = 1;
    return cfg;
}

std::string run_to_string(const ExperimentConfig& cfg) {
    std::ostringstream out;
    (void)run_experiment(cfg, &out);
    return out.str();
}

std::size_t count_substr(const std::string& s, const std::string& needle) {
    std::size_t count = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++count;
    return count;
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("subscan_test_" + name);
}

}  // namespace

TEST_CASE("default configuration") {
    const ExperimentConfig cfg;
    CHECK(cfg.M == 200);
    CHECK(cfg.N == 100);
    CHECK(cfg.B == 500);
    CHECK(cfg.reps == 100);
    CHECK(cfg.multipliers == std::vector<double>{0.625, 0.75, 0.875, 1.0, 1.125, 1.25, 1.375, 1.5});
    CHECK(cfg.sizes == std::vector<SizePair>{{10, 15}, {30, 10}});
    CHECK(cfg.effective_kM() == 2);
    CHECK(cfg.effective_kN() == 2);
    CHECK(cfg.mode == ExperimentMode::NetBonferroni);
    CHECK_NOTHROW(cfg.validate());

    ExperimentConfig one = cfg;
    one.sizes = {{10, 15}};
    one.kinds = {PermutationKind::Bidimensional};
    CHECK(one.expected_rows() == 800);
    CHECK(cfg.expected_rows() == 8 * 2 * 2 * 100);
}

TEST_CASE("configuration validation") {
    auto bad = [](auto mutate) {
        ExperimentConfig cfg;
        mutate(cfg);
        return cfg;
    };
    CHECK_THROWS_AS(bad([](auto& c) { c.multipliers = {1.0, 0.5}; }).validate(), InvalidParameter);
    CHECK_THROWS_AS(bad([](auto& c) { c.multipliers = {0.0, 0.5}; }).validate(), InvalidParameter);
    CHECK_THROWS_AS(bad([](auto& c) { c.multipliers = {}; }).validate(), InvalidParameter);
    CHECK_THROWS_AS(bad([](auto& c) { c.reps = 0; }).validate(), InvalidParameter);
    CHECK_THROWS_AS(bad([](auto& c) { c.B = 0; }).validate(), InvalidParameter);
    CHECK_THROWS_AS(bad([](auto& c) { c.sizes = {{201, 1}}; }).validate(), InvalidParameter);
    CHECK_THROWS_AS(bad([](auto& c) { c.sizes = {}; }).validate(), InvalidParameter);
    CHECK_THROWS_AS(bad([](auto& c) { c.kinds = {}; }).validate(), InvalidParameter);
    CHECK_THROWS_AS(bad([](auto& c) { c.alpha = 1.5; }).validate(), InvalidParameter);
    CHECK_THROWS_AS(bad([](auto& c) { c.restarts = 0; }).validate(), InvalidParameter);
    CHECK_THROWS_AS(bad([](auto& c) {
                        c.mode = ExperimentMode::UpperBound;
                        c.sizes = {{192, 10}};
                    }).validate(),
                    InvalidParameter);
}

TEST_CASE("JSON configuration") {
    const auto cfg = ExperimentConfig::from_json(R"({
        "family": "poisson", "M": 50, "N": 40, "sizes": [[5, 6]], "kinds": ["uni"],
        "B": 99, "reps": 3, "multipliers": [0.5, 1.0], "kM": 3, "kN": "default",
        "seed": 17, "restarts": 4, "max_iters": 30, "exact_scan": false,
        "share_permutations": false, "alpha": 0.1, "mode": "upper-bound", "threads": 2, "timing": false
    })");
    CHECK(cfg.family.kind == FamilyKind::CenteredPoisson);
    CHECK(cfg.M == 50);
    CHECK(cfg.sizes == std::vector<SizePair>{{5, 6}});
    CHECK(cfg.kinds == std::vector<PermutationKind>{PermutationKind::Unidimensional});
    CHECK(cfg.effective_kM() == 3);
    CHECK(cfg.effective_kN() == default_k(40));
    CHECK(cfg.mode == ExperimentMode::UpperBound);
    CHECK(cfg.threads == 2);
    CHECK_FALSE(cfg.timing);
    CHECK_FALSE(cfg.share_permutations);

    // the echoed configuration parses back to the same result-determining fields
    const auto again = ExperimentConfig::from_json(cfg.to_json());
    CHECK(again.to_json() == cfg.to_json());

    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"bogus": 1})"), InvalidParameter);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"B": "many"})"), InvalidParameter);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"reps": -1})"), InvalidParameter);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"kM": 0})"), InvalidParameter);
    CHECK_THROWS_AS(ExperimentConfig::from_json("[1, 2]"), ParseError);
    CHECK_THROWS_AS(ExperimentConfig::from_json("{"), ParseError);
}

TEST_CASE("mode names") {
    CHECK(parse_mode("net-bonferroni") == ExperimentMode::NetBonferroni);
    CHECK(parse_mode("upper-bound") == ExperimentMode::UpperBound);
    CHECK(to_string(ExperimentMode::UpperBound) == "upper-bound");
    CHECK_THROWS_AS(parse_mode("fdr"), InvalidParameter);
}

TEST_CASE("run_experiment rows") {
    const auto cfg = small_config();
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == cfg.expected_rows());
    CHECK(rows.size() == 2 * 2 * 2 * 2);
    // lexicographic cell order: size, kind, multiplier, replicate
    CHECK(rows[0].m == 4);
    CHECK(rows[0].kind == PermutationKind::Unidimensional);
    CHECK(rows[0].multiplier == 0.5);
    CHECK(rows[0].replicate == 0);
    CHECK(rows[1].replicate == 1);
    CHECK(rows[2].multiplier == 1.5);
    CHECK(rows[4].kind == PermutationKind::Bidimensional);
    CHECK(rows[8].m == 6);
    for (const auto& r : rows) {
        CHECK(r.pvalue > 0.0);
        CHECK(r.pvalue <= 1.0);
        CHECK(r.floor <= 1.0);
        CHECK(r.net_rows == build_net(30, 2).size());
        CHECK(r.net_cols == build_net(20, 2).size());
        CHECK(r.floor == doctest::Approx(std::min(static_cast<double>(r.net_rows * r.net_cols) / 20.0, 1.0)));
        CHECK(r.floor == bonferroni_correct(r.net_rows * r.net_cols, 1.0 / 20.0));
        CHECK(r.theta == r.multiplier * theta_crit(30, 20, r.m, r.n));
        CHECK(r.B == 19);
    }
    // both kinds share the instance of a (size, multiplier, replicate) cell
    CHECK(rows[0].seed == rows[4].seed);
    CHECK(rows[0].seed != rows[1].seed);
}

TEST_CASE("run_experiment is deterministic across runs and thread counts") {
    auto cfg = small_config();
    const auto a = run_to_string(cfg);
    CHECK(a == run_to_string(cfg));
    cfg.threads = 4;
    CHECK(a == run_to_string(cfg));
    cfg.threads = 8;
    CHECK(a == run_to_string(cfg));
    cfg.seed += 1;
    CHECK(a != run_to_string(cfg));
}

TEST_CASE("CSV preamble echoes the configuration") {
    auto cfg = small_config();
    const auto text = run_to_string(cfg);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# subscan experiment");
    std::getline(in, line);
    CHECK(line == "# config: " + cfg.to_json());
    std::getline(in, line);
    CHECK(line == "# rows: 16");
    std::getline(in, line);
    CHECK(line == "family,M,N,m,n,perm_kind,multiplier,theta,replicate,B,kM,kN,net_rows,net_cols,pvalue,floor,seed");
    CHECK(count_substr(text, "\n") == 4 + 16);

    cfg.timing = true;
    const auto timed = run_to_string(cfg);
    CHECK(timed.find(",floor,wall_ms,seed\n") != std::string::npos);
}

TEST_CASE("CSV round trip is exact") {
    auto cfg = small_config();
    cfg.timing = true;
    const auto rows = run_experiment(cfg);
    for (bool timing : {true, false}) {
        std::istringstream in(serialize_rows(rows, timing));
        auto back = parse_csv(in);
        if (!timing) {
            for (auto& r : back) CHECK(r.wall_ms == 0.0);
            auto stripped = rows;
            for (auto& r : stripped) r.wall_ms = 0.0;
            CHECK(back == stripped);
        } else {
            CHECK(back == rows);
        }
    }
    // awkward doubles survive too
    ResultRow r;
    r.multiplier = 0.1;
    r.theta = 1.0 / 3.0;
    r.pvalue = 2.0 / 501.0;
    r.floor = 195.0 / 501.0;
    r.wall_ms = 1e-300;
    r.seed = UINT64_MAX;
    std::istringstream in(serialize_rows({r}, true));
    CHECK(parse_csv(in) == std::vector<ResultRow>{r});
}

TEST_CASE("CSV parse errors name the line") {
    const std::string header =
        "family,M,N,m,n,perm_kind,multiplier,theta,replicate,B,kM,kN,net_rows,net_cols,pvalue,floor,seed\n";
    const std::string good = "gaussian,30,20,4,5,bidimensional,0.5,0.3,0,19,2,2,9,8,1,1,42\n";
    auto line_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            (void)parse_csv(in);
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    CHECK(line_of("# c\n" + header + good + "gaussian,30,20\n") == 4);
    CHECK(line_of(header + good + "gaussian,30,20,4,5,bidimensional,x,0.3,0,19,2,2,9,8,1,1,42\n") == 3);
    CHECK(line_of(header + "gaussian,30,20,4,5,sideways,0.5,0.3,0,19,2,2,9,8,1,1,42\n") == 2);
    CHECK(line_of(header + "gaussian,30,20,4,5,bidimensional,0.5,0.3,0,19,2,2,9,8,0,1,42\n") == 2);
    CHECK(line_of("family,M,bogus\n") == 1);
    CHECK(line_of("") == 1);
    std::istringstream ok(header + good);
    CHECK(parse_csv(ok).size() == 1);
}

TEST_CASE("upper-bound mode") {
    auto cfg = small_config();
    cfg.mode = ExperimentMode::UpperBound;
    cfg.kinds = {PermutationKind::Bidimensional};
    const auto rows = run_experiment(cfg);
    CHECK(rows.size() == cfg.expected_rows());
    for (const auto& r : rows) {
        CHECK(r.pvalue > 0.0);
        CHECK(r.pvalue <= 1.0);
    }
}

TEST_CASE("run_experiment_to_file") {
    auto cfg = small_config();
    cfg.timing = false;
    cfg.output_csv = temp_path("out.csv").string();
    const auto rows = run_experiment_to_file(cfg);
    CHECK(parse_csv_file(cfg.output_csv) == rows);
    std::filesystem::remove(cfg.output_csv);

    cfg.output_csv = "/nonexistent-dir/x/out.csv";
    CHECK_THROWS_AS(run_experiment_to_file(cfg), Error);
    CHECK_THROWS_AS(parse_csv_file("/nonexistent-dir/in.csv"), Error);
}

TEST_CASE("progress callback") {
    std::size_t calls = 0, last = 0;
    (void)run_experiment(small_config(), nullptr, [&](std::size_t done, std::size_t total) {
        ++calls;
        CHECK(done > last);
        CHECK(total == 16);
        last = done;
    });
    CHECK(calls == 16);
    CHECK(last == 16);
}

TEST_CASE("median and summarize") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK_THROWS_AS(median({}), InvalidParameter);

    std::vector<ResultRow> rows;
    for (double mult : {1.5, 0.5}) {
        for (int rep = 0; rep < 3; ++rep) {
            ResultRow r;
            r.m = 4;
            r.n = 5;
            r.multiplier = mult;
            r.pvalue = mult < 1 ? 1.0 - 0.1 * rep : 0.2 + 0.1 * rep;
            r.floor = 0.2;
            rows.push_back(r);
        }
    }
    const auto panels = summarize(rows);
    REQUIRE(panels.size() == 1);
    REQUIRE(panels[0].points.size() == 2);
    CHECK(panels[0].points[0].multiplier == 0.5);
    CHECK(panels[0].points[0].median == doctest::Approx(0.9));
    CHECK(panels[0].points[0].min == doctest::Approx(0.8));
    CHECK(panels[0].points[1].max == doctest::Approx(0.4));
    CHECK(panels[0].points[1].count == 3);
    CHECK(panels[0].floor == 0.2);
}

TEST_CASE("SVG output") {
    SUBCASE("header only") {
        const auto path = temp_path("empty.csv");
        {
            std::ofstream f(path);
            f << "family,M,N,m,n,perm_kind,multiplier,theta,replicate,B,kM,kN,net_rows,net_cols,pvalue,floor,seed\n";
        }
        const auto svg_path = temp_path("empty.svg");
        emit_plot(path, svg_path);
        std::ifstream in(svg_path);
        const std::string svg((std::istreambuf_iterator<char>(in)), {});
        CHECK(svg.rfind("<svg", 0) == 0);
        CHECK(svg.find("</svg>") != std::string::npos);
        CHECK(svg.find("viewBox=\"0 0 1600 900\"") != std::string::npos);
        CHECK(svg.find("class=\"axes\"") != std::string::npos);
        CHECK(count_substr(svg, "class=\"point\"") == 0);
        std::filesystem::remove(path);
        std::filesystem::remove(svg_path);
    }
    SUBCASE("single row") {
        ResultRow r;
        r.m = 10;
        r.n = 15;
        r.multiplier = 1.0;
        r.pvalue = 0.5;
        r.floor = 0.39;
        const auto svg = render_svg({r});
        CHECK(count_substr(svg, "class=\"point\"") == 1);
        CHECK(count_substr(svg, "class=\"floor\"") == 1);
        CHECK(count_substr(svg, "class=\"reference\"") == 1);
    }
    SUBCASE("one panel per size and kind") {
        const auto rows = run_experiment(small_config());
        const auto svg = render_svg(rows);
        CHECK(count_substr(svg, "class=\"axes\"") == 4);
        CHECK(count_substr(svg, "class=\"median\"") == 4);
        CHECK(count_substr(svg, "class=\"band\"") == 4);
        CHECK(count_substr(svg, "class=\"point\"") == 8);
    }
    SUBCASE("malformed CSV") {
        const auto path = temp_path("bad.csv");
        {
            std::ofstream f(path);
            f << "family,M\nnot,a,row\n";
        }
        CHECK_THROWS_AS(emit_plot(path, temp_path("bad.svg")), ParseError);
        std::filesystem::remove(path);
    }
}
