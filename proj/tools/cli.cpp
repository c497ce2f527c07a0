#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <bit>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "subscan/detect.hpp"
#include "subscan/error.hpp"
#include "subscan/experiment.hpp"
#include "subscan/model.hpp"
#include "subscan/net.hpp"
#include "subscan/stats.hpp"
#include "subscan/theory.hpp"

namespace subscan::cli {

namespace {

using nlohmann::json;

// Flat JSON object -> CLI11 config items. Arrays become multi-valued options.
// Keys are routed to `section`, the subcommand being run.
class JsonConfig : public CLI::Config {
public:
    std::string section;

    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        json j;
        for (const CLI::Option* opt : app->get_options({})) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const std::string name = opt->get_lnames().front();
            if (opt->count() > 0) {
                j[name] = opt->as<std::string>();
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        return j.dump(2);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        try {
            input >> j;
        } catch (const json::exception& e) {
            throw CLI::ConversionError(std::string("invalid JSON config: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("JSON config must be an object");
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            item.name = key;
            if (!section.empty()) item.parents = {section};
            auto text = [](const json& v) {
                if (v.is_string()) return v.get<std::string>();
                if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
                return v.dump();
            };
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(text(v));
            } else {
                item.inputs.push_back(text(value));
            }
            items.push_back(std::move(item));
        }
        return items;
    }
};

// The bundled demo: the 3x4 matrix with entries 1..12 in row-major order.
DataMatrix demo_matrix() {
    return DataMatrix::from_rows({{1, 2, 3, 4}, {5, 6, 7, 8}, {9, 10, 11, 12}});
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Where a command gets its data matrix from: a text file, the demo, or a
/// freshly generated planted instance.
struct MatrixSource {
    std::string input;
    bool demo = false;
    std::size_t M = 200, N = 100, m = 0, n = 0;
    double theta = 0.0;
    std::optional<double> multiplier;
    std::string family = "gaussian";

    void add_to(CLI::App* app, bool with_planted_size) {
        app->add_option("--input", input, "Matrix text file (rows per line, comma or space separated)");
        app->add_flag("--demo", demo, "Use the bundled 3x4 matrix with entries 1..12");
        app->add_option("--M", M, "Rows of a generated matrix")->capture_default_str();
        app->add_option("--N", N, "Columns of a generated matrix")->capture_default_str();
        if (with_planted_size) {
            app->add_option("--planted-m", m, "Planted block rows (0 = none)");
            app->add_option("--planted-n", n, "Planted block columns (0 = none)");
        }
        app->add_option("--theta", theta, "Planted signal level");
        app->add_option("--multiplier", multiplier, "Planted signal as a multiple of theta_crit");
        app->add_option("--family", family, "gaussian | poisson | rademacher")->capture_default_str();
    }

    DataMatrix load(std::uint64_t seed) const {
        if (demo) return demo_matrix();
        if (!input.empty()) return parse_matrix(read_file(input));
        return generate(seed).data;
    }

    PlantedInstance generate(std::uint64_t seed) const {
        double t = theta;
        if (multiplier) {
            if (m == 0 || n == 0) throw InvalidParameter("--multiplier needs a planted block size");
            t = *multiplier * theta_crit(M, N, m, n);
        }
        return generate_instance(M, N, m, n, t, NoiseFamily{parse_family(family)}, seed);
    }
};

struct EngineOptions {
    bool exact = false;
    int restarts = 20;
    int max_iters = 100;
    std::uint64_t budget = kDefaultExactBudget;

    void add_to(CLI::App* app) {
        app->add_flag("--exact", exact, "Use the exhaustive scan instead of LAS");
        app->add_option("--restarts", restarts, "LAS random restarts")->capture_default_str();
        app->add_option("--max-iters", max_iters, "LAS alternation cap")->capture_default_str();
        app->add_option("--budget", budget, "Exact-scan budget on C(M,m)*N")->capture_default_str();
    }

    ScanEngine engine() const { return {exact, restarts, max_iters, budget}; }
};

struct CalibrationOptions {
    std::uint64_t B = 500;
    std::string kind = "bidimensional";
    double alpha = 0.05;
    unsigned threads = 1;
    bool share = false;

    void add_to(CLI::App* app) {
        app->add_option("--B", B, "Monte Carlo permutations")->capture_default_str();
        app->add_option("--kind", kind, "unidimensional | bidimensional")->capture_default_str();
        app->add_option("--alpha", alpha, "Test level")->capture_default_str();
        app->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
        app->add_flag("--share-permutations", share, "Score all sizes on one permutation stream");
    }

    MCConfig config(std::uint64_t seed, const ScanEngine& engine) const {
        MCConfig cfg;
        cfg.B = B;
        cfg.kind = parse_permutation_kind(kind);
        cfg.seed = seed;
        cfg.engine = engine;
        cfg.share_permutations = share;
        cfg.threads = threads;
        return cfg;
    }
};

json support_json(const SubmatrixSupport& s) {
    // 1-based, like the index sets [M] and [N]
    json rows = json::array(), cols = json::array();
    for (auto i : s.rows) rows.push_back(i + 1);
    for (auto j : s.cols) cols.push_back(j + 1);
    return {{"rows", rows}, {"cols", cols}};
}

json engine_json(const ScanEngine& e) {
    if (e.exact) return {{"type", "exact"}, {"budget", e.exact_budget}};
    return {{"type", "las"}, {"restarts", e.restarts}, {"max_iters", e.max_iters}};
}

json pvalue_json(const PValue& p) { return {{"value", p.value}, {"exceedances", p.exceedances}, {"B", p.B}}; }

json outcome_json(const TestOutcome& o) {
    json per = json::array();
    for (const auto& s : o.per_size) per.push_back({{"m", s.m}, {"n", s.n}, {"p", pvalue_json(s.p)}});
    json j = {{"corrected_pvalue", o.corrected_pvalue},
              {"min_pvalue", o.min_pvalue()},
              {"correction", std::string(to_string(o.correction))},
              {"correction_factor", o.correction_factor},
              {"floor", bonferroni_correct(o.correction_factor, monte_carlo_pvalue(0, o.B).value)},
              {"alpha", o.alpha},
              {"reject", o.reject},
              {"seed", o.seed},
              {"B", o.B},
              {"kind", std::string(to_string(o.kind))},
              {"engine", engine_json(o.engine)},
              {"shared_permutations", o.shared_permutations},
              {"per_size", per}};
    if (o.correction == Correction::Net) {
        j["kM"] = o.kM;
        j["kN"] = o.kN;
    }
    return j;
}

std::vector<SizePair> parse_sizes(const std::vector<std::string>& specs) {
    std::vector<SizePair> out;
    for (const auto& s : specs) {
        const auto colon = s.find(':');
        if (colon == std::string::npos) throw InvalidParameter("size '" + s + "' must look like m:n");
        try {
            out.emplace_back(std::stoull(s.substr(0, colon)), std::stoull(s.substr(colon + 1)));
        } catch (const std::exception&) {
            throw InvalidParameter("size '" + s + "' must look like m:n");
        }
    }
    return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Size-adaptive submatrix detection by permutation scan tests"};
    app.require_subcommand(1);
    // --json-config belongs to the root so CLI11 reads it; fallthrough lets it
    // follow the subcommand name on the command line.
    auto json_config = std::make_shared<JsonConfig>();
    app.config_formatter(json_config);
    app.set_config("--json-config", "", "JSON object whose keys set the subcommand's options");
    app.fallthrough();
    app.allow_config_extras(CLI::config_extras_mode::error);
    std::uint64_t seed = 0;

    // gen ------------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "Generate a planted-submatrix instance");
    MatrixSource gen_src;
    gen_src.add_to(gen, true);
    std::string gen_format = "csv";
    gen->add_option("--seed", seed, "Random seed")->capture_default_str();
    gen->add_option("--format", gen_format, "csv | json")->capture_default_str();

    // scan -----------------------------------------------------------------
    auto* scan = app.add_subcommand("scan", "Scan statistic of a matrix");
    MatrixSource scan_src;
    scan_src.add_to(scan, true);
    EngineOptions scan_engine;
    scan_engine.add_to(scan);
    std::size_t scan_m = 0, scan_n = 0;
    scan->add_option("--m", scan_m, "Submatrix rows")->required();
    scan->add_option("--n", scan_n, "Submatrix columns")->required();
    scan->add_option("--seed", seed, "Random seed")->capture_default_str();

    // test -----------------------------------------------------------------
    auto* test = app.add_subcommand("test", "Single-size permutation scan test");
    MatrixSource test_src;
    test_src.add_to(test, true);
    EngineOptions test_engine;
    test_engine.add_to(test);
    CalibrationOptions test_cal;
    test_cal.add_to(test);
    std::size_t test_m = 0, test_n = 0;
    test->add_option("--m", test_m, "Submatrix rows")->required();
    test->add_option("--n", test_n, "Submatrix columns")->required();
    test->add_option("--seed", seed, "Random seed")->capture_default_str();

    // bonf -----------------------------------------------------------------
    auto* bonf = app.add_subcommand("bonf", "Bonferroni test over unknown submatrix sizes");
    MatrixSource bonf_src;
    bonf_src.add_to(bonf, true);
    EngineOptions bonf_engine;
    bonf_engine.add_to(bonf);
    CalibrationOptions bonf_cal;
    bonf_cal.add_to(bonf);
    unsigned bonf_kM = 0, bonf_kN = 0;
    std::vector<std::string> bonf_sizes;
    bool bonf_all = false;
    bool bonf_upper = false;
    std::size_t bonf_m = 0, bonf_n = 0;
    bonf->add_option("--kM", bonf_kM, "Row net resolution (0 = default)");
    bonf->add_option("--kN", bonf_kN, "Column net resolution (0 = default)");
    bonf->add_option("--sizes", bonf_sizes, "Full-grid mode: explicit sizes m:n (factor M*N)");
    bonf->add_flag("--all-sizes", bonf_all, "Full-grid mode over every (m, n)");
    bonf->add_flag("--upper-bound", bonf_upper, "Single-pair upper bound at the net neighbors above (m, n)");
    bonf->add_option("--m", bonf_m, "Upper-bound mode: target rows");
    bonf->add_option("--n", bonf_n, "Upper-bound mode: target columns");
    bonf->add_option("--seed", seed, "Random seed")->capture_default_str();

    // net ------------------------------------------------------------------
    auto* netc = app.add_subcommand("net", "Print the approximation net S_k(M)");
    std::uint64_t net_M = 0;
    unsigned net_k = 0;
    netc->add_option("--M", net_M, "Upper end of [M]")->required();
    netc->add_option("--k", net_k, "Kept binary digits (0 = default)");
    netc->add_option("--seed", seed, "Accepted for uniformity; unused");

    // regime ---------------------------------------------------------------
    auto* regime = app.add_subcommand("regime", "theta_crit and detection ratios");
    std::size_t rg_M = 0, rg_N = 0, rg_m = 0, rg_n = 0;
    double rg_theta = 0.0;
    std::optional<double> rg_t, rg_var, rg_spread;
    regime->add_option("--M", rg_M)->required();
    regime->add_option("--N", rg_N)->required();
    regime->add_option("--m", rg_m)->required();
    regime->add_option("--n", rg_n)->required();
    regime->add_option("--theta", rg_theta, "Signal level")->capture_default_str();
    regime->add_option("--t", rg_t, "Deviation for the log p-value bound");
    regime->add_option("--variance", rg_var, "Population variance for the bound");
    regime->add_option("--spread", rg_spread, "Population max minus mean for the bound");
    regime->add_option("--seed", seed, "Accepted for uniformity; unused");

    // experiment -----------------------------------------------------------
    auto* exp = app.add_subcommand("experiment", "Run the simulation sweep and write CSV");
    std::string exp_config_path, exp_output, exp_svg, exp_mode;
    std::optional<std::uint64_t> exp_seed, exp_B;
    std::optional<std::size_t> exp_reps;
    std::optional<int> exp_restarts;
    std::optional<unsigned> exp_threads;
    bool exp_no_timing = false;
    bool exp_quiet = false;
    exp->add_option("--json-config", exp_config_path, "ExperimentConfig JSON file");
    exp->add_option("--output", exp_output, "CSV output path (default: stdout)");
    exp->add_option("--svg", exp_svg, "Also render an SVG plot here");
    exp->add_option("--seed", exp_seed, "Base seed");
    exp->add_option("--B", exp_B, "Monte Carlo permutations");
    exp->add_option("--reps", exp_reps, "Replicates per cell");
    exp->add_option("--restarts", exp_restarts, "LAS restarts");
    exp->add_option("--threads", exp_threads, "Worker threads (0 = all cores)");
    exp->add_option("--mode", exp_mode, "net-bonferroni | upper-bound");
    exp->add_flag("--no-timing", exp_no_timing, "Drop the wall-clock column");
    exp->add_flag("--quiet", exp_quiet, "No progress on stderr");

    // plot -----------------------------------------------------------------
    auto* plot = app.add_subcommand("plot", "Render an experiment CSV as SVG");
    std::string plot_csv, plot_out;
    plot->add_option("--csv", plot_csv, "Experiment CSV")->required();
    plot->add_option("--output", plot_out, "SVG path")->required();
    plot->add_option("--seed", seed, "Accepted for uniformity; unused");

    for (std::size_t i = 1; i < args.size(); ++i) {
        if (app.get_subcommand_no_throw(args[i]) != nullptr) {
            json_config->section = args[i];
            break;
        }
    }
    std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        // --help on a subcommand surfaces as CallForHelp from that subcommand
        err << "error: " << e.what() << '\n';
        return kValidationError;
    }

    try {
        if (*gen) {
            const PlantedInstance inst = gen_src.generate(seed);
            if (gen_format == "json") {
                json rows = json::array();
                for (std::size_t i = 0; i < inst.data.rows(); ++i) {
                    const auto r = inst.data.row(i);
                    rows.push_back(std::vector<double>(r.begin(), r.end()));
                }
                json j = {{"M", inst.data.rows()}, {"N", inst.data.cols()}, {"theta", inst.theta},
                          {"family", std::string(to_string(inst.family.kind))}, {"seed", inst.seed},
                          {"data", rows}};
                j["support"] = inst.support ? support_json(*inst.support) : json(nullptr);
                out << j.dump() << '\n';
            } else if (gen_format == "csv") {
                out << format_matrix(inst.data);
            } else {
                throw InvalidParameter("--format must be csv or json");
            }
        } else if (*scan) {
            const DataMatrix X = scan_src.load(seed);
            const ScanEngine engine = scan_engine.engine();
            const ScanResult r = Scanner(X).scan(scan_m, scan_n, engine, seed);
            json j = {{"value", r.value}, {"exact", r.exact}, {"m", scan_m}, {"n", scan_n},
                      {"restarts_used", r.restarts_used}, {"iterations", r.iterations},
                      {"sum", sum_stat(X)}, {"engine", engine_json(engine)}, {"seed", seed}};
            j["support"] = support_json(r.support);
            out << j.dump() << '\n';
        } else if (*test) {
            const DataMatrix X = test_src.load(seed);
            const MCConfig cfg = test_cal.config(seed, test_engine.engine());
            out << outcome_json(single_size_test(X, test_m, test_n, cfg, test_cal.alpha)).dump() << '\n';
        } else if (*bonf) {
            const DataMatrix X = bonf_src.load(seed);
            const MCConfig cfg = bonf_cal.config(seed, bonf_engine.engine());
            const unsigned kM = bonf_kM != 0 ? bonf_kM : default_k(X.rows());
            const unsigned kN = bonf_kN != 0 ? bonf_kN : default_k(X.cols());
            if (bonf_upper) {
                const UpperBound ub = upper_bound_single_pair(X, bonf_m, bonf_n, kM, kN, cfg);
                json j = {{"bound", ub.bound}, {"m_neighbor", ub.m_neighbor}, {"n_neighbor", ub.n_neighbor},
                          {"p", pvalue_json(ub.p)}, {"correction_factor", ub.correction_factor},
                          {"kM", kM}, {"kN", kN}, {"seed", seed}, {"engine", engine_json(cfg.engine)}};
                out << j.dump() << '\n';
            } else if (bonf_all || !bonf_sizes.empty()) {
                std::vector<SizePair> sizes;
                if (bonf_all) {
                    for (std::size_t m = 1; m <= X.rows(); ++m)
                        for (std::size_t n = 1; n <= X.cols(); ++n) sizes.emplace_back(m, n);
                } else {
                    sizes = parse_sizes(bonf_sizes);
                }
                out << outcome_json(bonferroni_full(X, sizes, cfg, bonf_cal.alpha)).dump() << '\n';
            } else {
                out << outcome_json(bonferroni_net(X, kM, kN, cfg, bonf_cal.alpha)).dump() << '\n';
            }
        } else if (*netc) {
            const unsigned k = net_k != 0 ? net_k : default_k(net_M);
            const ApproxNet net = build_net(net_M, k);
            const auto width = static_cast<unsigned>(std::bit_width(net_M));
            for (auto it = net.elements.rbegin(); it != net.elements.rend(); ++it) {
                out << to_binary(*it, width) << ' ' << *it << '\n';
            }
        } else if (*regime) {
            const RegimeReport r = detection_ratios(rg_theta, rg_M, rg_N, rg_m, rg_n);
            json j = {{"M", r.M}, {"N", r.N}, {"m", r.m}, {"n", r.n}, {"theta", r.theta},
                      {"theta_crit", r.theta_crit}, {"scan_ratio", r.scan_ratio}, {"sum_ratio", r.sum_ratio}};
            if (rg_t || rg_var || rg_spread) {
                if (!rg_t || !rg_var || !rg_spread) {
                    throw InvalidParameter("--t, --variance and --spread must be given together");
                }
                j["log_pvalue_bound"] = log_pvalue_bound(rg_M, rg_N, rg_m, rg_n, *rg_t, *rg_var, *rg_spread);
            }
            out << j.dump() << '\n';
        } else if (*exp) {
            ExperimentConfig cfg = exp_config_path.empty() ? ExperimentConfig{}
                                                           : ExperimentConfig::from_json(read_file(exp_config_path));
            if (exp_seed) cfg.seed = *exp_seed;
            if (exp_B) cfg.B = *exp_B;
            if (exp_reps) cfg.reps = *exp_reps;
            if (exp_restarts) cfg.restarts = *exp_restarts;
            if (exp_threads) cfg.threads = *exp_threads;
            if (!exp_mode.empty()) cfg.mode = parse_mode(exp_mode);
            if (exp_no_timing) cfg.timing = false;
            if (!exp_output.empty()) cfg.output_csv = exp_output;
            if (!exp_svg.empty()) cfg.output_svg = exp_svg;
            cfg.validate();

            ProgressFn progress;
            if (!exp_quiet) {
                progress = [&err](std::size_t done, std::size_t total) {
                    err << "\r" << done << "/" << total << " cells" << std::flush;
                    if (done == total) err << '\n';
                };
            }
            const auto rows = cfg.output_csv.empty() ? run_experiment(cfg, &out, progress)
                                                     : run_experiment_to_file(cfg, progress);
            if (!cfg.output_svg.empty()) {
                std::ofstream svg(cfg.output_svg, std::ios::binary | std::ios::trunc);
                if (!svg) throw Error("cannot open " + cfg.output_svg + " for writing");
                svg << render_svg(rows);
            }
        } else if (*plot) {
            emit_plot(plot_csv, plot_out);
        }
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const BoundsError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}

}  // namespace subscan::cli
