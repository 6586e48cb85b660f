#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "texp/brute.hpp"
#include "texp/explain.hpp"
#include "texp/hitting_set.hpp"
#include "texp/intervals.hpp"
#include "texp/max_iaxp.hpp"
#include "texp/model.hpp"
#include "texp/te_encoding.hpp"

using json = nlohmann::ordered_json;
using namespace texp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitModel = 2;
constexpr int kExitBudget = 3;
constexpr int kExitInternal = 4;

struct QuerySpec {
    std::string command;
    std::string model_path;
    std::string instance_csv;
    int row = -1;
    std::string data_path;
    std::string measure = "prop";
    std::string encoding = "bounds";
    bool seed_singletons = false;
    std::uint64_t max_iter = 100000;
    double timeout_s = 0.0;
    bool verify = false;
    std::string output;
    std::string export_what;
    std::int64_t scale = 1000000;
    bool verbose = false;
};

// Owns every piece a query needs.
struct Session {
    QuerySpec spec;
    std::optional<Dataset> data;
    TreeEnsemble te;
    IntervalTable table;
    std::optional<SizeMeasure> measure;
    ExplanationProblem problem;

    explicit Session(const QuerySpec& s) : spec(s) {
        if (!spec.data_path.empty()) data = load_dataset(spec.data_path);
        te = load_model(spec.model_path, data ? &*data : nullptr);
        table = build_interval_table(te);
        if (spec.measure == "data") {
            if (!data) throw DataError("--measure data needs --data");
            measure = SizeMeasure::data_proportion(table, te.feature_space, *data);
        } else {
            measure = SizeMeasure::proportion(table);
        }
        problem = make_problem(te, table, *measure, make_instance(te, instance_values()));
    }

    std::vector<double> instance_values() const {
        if (spec.row >= 0) {
            if (!data) throw DataError("--row needs --data");
            if (spec.row >= static_cast<int>(data->num_rows()))
                throw DataError("--row out of range");
            std::vector<double> v;
            for (const std::string& name : te.feature_space.names) {
                int col = data->column_index(name);
                if (col < 0) throw DataError("dataset has no column '" + name + "'");
                v.push_back(data->rows[spec.row][col]);
            }
            return v;
        }
        if (spec.instance_csv.empty())
            throw DataError("no instance given (use --instance or --row)");
        std::vector<double> v;
        std::istringstream is(spec.instance_csv);
        std::string cell;
        while (std::getline(is, cell, ',')) {
            try {
                v.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw DataError("instance: bad number '" + cell + "'");
            }
        }
        return v;
    }

    OracleEncoding oracle_encoding() const {
        return spec.encoding == "naive" ? OracleEncoding::Naive : OracleEncoding::Bounds;
    }
};

json query_echo(const Session& s) {
    json q;
    q["command"] = s.spec.command;
    q["model"] = s.spec.model_path;
    q["instance"] = s.problem.instance.values;
    q["measure"] = s.spec.measure;
    if (s.spec.command == "max-iaxp" || s.spec.command == "export") {
        q["encoding"] = s.spec.encoding;
        q["seed_singletons"] = s.spec.seed_singletons;
        q["max_iter"] = s.spec.max_iter;
        q["timeout_s"] = s.spec.timeout_s;
    }
    return q;
}

json prediction_block(const Session& s) {
    json p;
    p["class"] = s.te.classes[s.problem.target()];
    json w = json::object();
    std::vector<double> weights = class_weights(s.te, s.problem.instance.values);
    for (int c = 0; c < s.te.num_classes(); ++c) w[s.te.classes[c]] = weights[c];
    p["weights"] = std::move(w);
    return p;
}

json interval_block(const Session& s, const Region& region,
                    const std::vector<int>& features) {
    json arr = json::array();
    for (int i : features) {
        const IdxRange& r = region.ranges[i];
        json row;
        row["feature"] = s.te.feature_space.names[i];
        row["lo"] = s.table.interval_lo(i, r.lo);
        row["hi"] = s.table.interval_hi(i, r.hi);
        row["hi_closed"] = s.table.hi_closed(i, r.hi);
        row["interval_indices"] = {r.lo, r.hi};
        arr.push_back(std::move(row));
    }
    return arr;
}

json feature_names(const Session& s, const std::vector<int>& features) {
    json arr = json::array();
    for (int i : features) arr.push_back(s.te.feature_space.names[i]);
    return arr;
}

void emit(const Session& s, const json& report) {
    std::string text = report.dump(2);
    text.push_back('\n');
    if (s.spec.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(s.spec.output);
        if (!out) throw DataError("cannot write " + s.spec.output);
        out << text;
    }
}

void human_summary(const Session& s, const json& report) {
    std::ostream& os = std::cerr;
    os << s.spec.command << " " << s.spec.model_path << "\n";
    os << "  class: " << report["prediction"]["class"].get<std::string>() << "\n";
    if (report.contains("explanation")) {
        const json& e = report["explanation"];
        os << "  features:";
        for (const auto& f : e["features"]) os << " " << f.get<std::string>();
        os << "\n";
        if (e.contains("intervals"))
            for (const auto& row : e["intervals"])
                os << "    " << row["feature"].get<std::string>() << " in ["
                   << row["lo"].get<double>() << ", " << row["hi"].get<double>()
                   << (row["hi_closed"].get<bool>() ? "]" : ")") << "\n";
        if (e.contains("coverage_percent"))
            os << "  coverage: " << e["coverage_percent"].get<double>() << "%\n";
        if (e.contains("maximum"))
            os << "  maximum: " << (e["maximum"].get<bool>() ? "yes" : "no") << "\n";
    }
    if (report.contains("verify"))
        os << "  verify: " << report["verify"].get<std::string>() << "\n";
}

// step-by-step maximality of an inflated region, against the grid
bool brute_maximal(const BruteOracle& brute, const Session& s, const Region& region) {
    if (!brute.is_weak_iaxp(region)) return false;
    for (int i = 0; i < s.problem.num_features(); ++i) {
        if (region.ranges[i].lo > 1) {
            Region ext = region;
            --ext.ranges[i].lo;
            if (brute.is_weak_iaxp(ext)) return false;
        }
        if (region.ranges[i].hi < s.table.num_intervals(i)) {
            Region ext = region;
            ++ext.ranges[i].hi;
            if (brute.is_weak_iaxp(ext)) return false;
        }
    }
    return true;
}

int finish(const Session& s, json& report, const std::string& verdict) {
    if (!verdict.empty()) report["verify"] = verdict;
    emit(s, report);
    human_summary(s, report);
    if (verdict.rfind("invalid", 0) == 0) return kExitInternal;
    return kExitOk;
}

int cmd_predict(const Session& s) {
    json report;
    report["query"] = query_echo(s);
    report["prediction"] = prediction_block(s);
    report["instance_intervals"] = s.problem.inst_box;
    return finish(s, report, "");
}

int cmd_explain(Session& s) {
    auto started = std::chrono::steady_clock::now();
    TeEncoding enc(s.te, s.table, s.problem.target());
    json explanation;
    std::string verdict;
    Region region;

    if (s.spec.command == "axp" || s.spec.command == "iaxp") {
        std::vector<int> axp = compute_axp(s.problem, enc);
        if (s.spec.command == "axp") {
            explanation["kind"] = "axp";
            explanation["features"] = feature_names(s, axp);
            explanation["size"] = axp.size();
            region = region_fixing(s.problem, axp);
            if (s.spec.verify) {
                try {
                    BruteOracle brute(s.problem);
                    bool weak = brute.is_weak_iaxp(region);
                    bool minimal = weak;
                    for (std::size_t d = 0; minimal && d < axp.size(); ++d) {
                        std::vector<int> sub = axp;
                        sub.erase(sub.begin() + static_cast<long>(d));
                        if (brute.is_weak_iaxp(region_fixing(s.problem, sub)))
                            minimal = false;
                    }
                    verdict = weak && minimal ? "valid, minimal" : "invalid";
                } catch (const CapExceeded&) {
                    verdict = "skipped: grid cap exceeded";
                }
            }
        } else {
            InflatedExplanation iaxp = inflate_axp(s.problem, enc, axp);
            region = iaxp.region;
            explanation["kind"] = "iaxp";
            explanation["features"] = feature_names(s, iaxp.features);
            explanation["size"] = iaxp.features.size();
            explanation["intervals"] = interval_block(s, iaxp.region, iaxp.features);
            explanation["fsc"] = iaxp.fsc_value;
            explanation["coverage_percent"] = coverage_percent(iaxp.fsc_value);
            if (s.spec.verify) {
                try {
                    BruteOracle brute(s.problem);
                    verdict = brute_maximal(brute, s, region) ? "valid, maximal"
                                                              : "invalid";
                } catch (const CapExceeded&) {
                    verdict = "skipped: grid cap exceeded";
                }
            }
        }
    } else {  // cxp
        std::vector<int> cxp = compute_cxp(s.problem, enc);
        explanation["kind"] = "cxp";
        explanation["features"] = feature_names(s, cxp);
        explanation["size"] = cxp.size();
        if (s.spec.verify) {
            try {
                BruteOracle brute(s.problem);
                std::vector<int> fixed;
                for (int i = 0; i < s.problem.num_features(); ++i)
                    if (std::find(cxp.begin(), cxp.end(), i) == cxp.end())
                        fixed.push_back(i);
                bool flips = !brute.is_weak_iaxp(region_fixing(s.problem, fixed));
                bool minimal = flips;
                for (std::size_t d = 0; minimal && d < cxp.size(); ++d) {
                    std::vector<int> sub_fixed = fixed;
                    sub_fixed.push_back(cxp[d]);
                    if (!brute.is_weak_iaxp(region_fixing(s.problem, sub_fixed)))
                        minimal = false;
                }
                verdict = flips && minimal ? "valid, minimal" : "invalid";
            } catch (const CapExceeded&) {
                verdict = "skipped: grid cap exceeded";
            }
        }
    }

    double wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    json report;
    report["query"] = query_echo(s);
    report["prediction"] = prediction_block(s);
    report["instance_intervals"] = s.problem.inst_box;
    report["explanation"] = std::move(explanation);
    report["stats"] = {{"checker_calls", enc.oracle_calls()}, {"wall_ms", wall_ms}};
    return finish(s, report, verdict);
}

int cmd_max_iaxp(Session& s) {
    TeEncoding enc(s.te, s.table, s.problem.target());
    MaxIaxpOptions opt;
    opt.encoding = s.oracle_encoding();
    opt.seed_singletons = s.spec.seed_singletons;
    opt.max_iterations = s.spec.max_iter;
    opt.timeout_s = s.spec.timeout_s;
    MaxIaxpResult res = compute_max_iaxp(s.problem, enc, opt);

    json explanation;
    explanation["kind"] = "max_iaxp";
    explanation["features"] = feature_names(s, res.features);
    explanation["size"] = res.features.size();
    explanation["intervals"] = interval_block(s, res.region, res.features);
    explanation["fsc"] = res.fsc_value;
    explanation["coverage_percent"] = coverage_percent(res.fsc_value);
    explanation["maximum"] = res.maximum;

    std::string verdict;
    if (s.spec.verify) {
        try {
            BruteOracle brute(s.problem);
            bool valid = brute.is_weak_iaxp(res.region);
            if (res.maximum) {
                auto [unused, best] = brute.max_iaxp();
                (void)unused;
                verdict = valid && std::abs(best - res.fsc_value) <= 1e-6
                              ? "valid, maximum"
                              : "invalid";
            } else {
                verdict = valid ? "valid, non-maximum" : "invalid";
            }
        } catch (const CapExceeded&) {
            verdict = "skipped: grid cap exceeded";
        }
    }

    json report;
    report["query"] = query_echo(s);
    report["prediction"] = prediction_block(s);
    report["instance_intervals"] = s.problem.inst_box;
    report["explanation"] = std::move(explanation);
    json stats;
    stats["oracle_calls"] = res.iterations;
    stats["checker_calls"] = res.checker_calls;
    stats["icxps_blocked"] = res.blocked.size();
    stats["seed_blocks"] = res.seed_blocks;
    stats["wall_ms"] = res.wall_ms;
    report["stats"] = std::move(stats);
    if (s.spec.verbose) {
        json trace = json::array();
        for (double f : res.fsc_trace) trace.push_back(f);
        report["fsc_trace"] = std::move(trace);
    }
    int rc = finish(s, report, verdict);
    if (rc == kExitOk && !res.maximum) return kExitBudget;
    return rc;
}

int cmd_export(Session& s) {
    std::string text;
    if (s.spec.export_what == "wcnf-te") {
        TeEncoding enc(s.te, s.table, s.problem.target());
        int opponent = -1;
        for (int c = 0; c < s.te.num_classes(); ++c)
            if (c != s.problem.target()) {
                opponent = c;
                break;
            }
        std::ostringstream os;
        os << "c tree-ensemble objective: target class '"
           << s.te.classes[s.problem.target()] << "', opponent class '"
           << s.te.classes[opponent] << "'\n";
        os << "c split literals first (per feature, ascending threshold), then one\n";
        os << "c literal per root-to-leaf path (per tree, left-first order)\n";
        os << export_wcnf(enc.objective_formula(opponent), s.spec.scale);
        text = os.str();
    } else if (s.spec.export_what == "wcnf-candidates") {
        CandidateOracle oracle(s.problem, s.oracle_encoding());
        std::ostringstream os;
        os << "c candidate-oracle formula (" << s.spec.encoding << " encoding)\n";
        os << "c interval choices y^i_{l,u} per feature, costs -log interval size\n";
        os << export_wcnf(oracle.formula(), s.spec.scale);
        text = os.str();
    } else if (s.spec.export_what == "lp") {
        if (s.oracle_encoding() != OracleEncoding::Bounds)
            throw DataError("--export lp requires --encoding bounds");
        CandidateOracle oracle(s.problem, OracleEncoding::Bounds);
        text = oracle.export_lp();
    } else {
        throw DataError("unknown --export artifact");
    }
    if (s.spec.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(s.spec.output);
        if (!out) throw DataError("cannot write " + s.spec.output);
        out << text;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    QuerySpec spec;
    CLI::App app{"formally guaranteed explanations for tree-ensemble classifiers"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--model", spec.model_path, "model document (json)")
            ->required();
        cmd->add_option("--data", spec.data_path,
                        "training data (csv, header row of feature names)");
        cmd->add_option("--instance", spec.instance_csv,
                        "instance as a comma-separated value list");
        cmd->add_option("--row", spec.row, "row index into --data (0-based)");
        cmd->add_option("--output", spec.output, "write the report here");
        return cmd;
    };
    auto add_measure = [&](CLI::App* cmd) {
        cmd->add_option("--measure", spec.measure, "interval size measure")
            ->check(CLI::IsMember({"prop", "data"}));
    };
    auto add_encoding = [&](CLI::App* cmd) {
        cmd->add_option("--encoding", spec.encoding, "candidate oracle encoding")
            ->check(CLI::IsMember({"naive", "bounds"}));
    };

    add_common(app.add_subcommand("predict", "classify an instance"));
    for (const char* kind : {"axp", "cxp", "iaxp"}) {
        CLI::App* cmd =
            add_common(app.add_subcommand(kind, std::string("compute a ") + kind));
        add_measure(cmd);
        cmd->add_flag("--verify", spec.verify, "brute-force check of the result");
    }
    {
        CLI::App* cmd = add_common(
            app.add_subcommand("max-iaxp", "maximum-coverage inflated explanation"));
        add_measure(cmd);
        add_encoding(cmd);
        cmd->add_flag("--seed-singletons", spec.seed_singletons,
                      "block size-1 contrastive boxes up front");
        cmd->add_option("--max-iter", spec.max_iter, "iteration budget");
        cmd->add_option("--timeout", spec.timeout_s, "time budget in seconds");
        cmd->add_flag("--verify", spec.verify, "brute-force check of the result");
        cmd->add_flag("-v,--verbose", spec.verbose, "include the per-iteration trace");
    }
    {
        CLI::App* cmd =
            add_common(app.add_subcommand("export", "write an encoding to a file"));
        add_measure(cmd);
        add_encoding(cmd);
        cmd->add_option("--export", spec.export_what, "wcnf-te|wcnf-candidates|lp")
            ->required()
            ->check(CLI::IsMember({"wcnf-te", "wcnf-candidates", "lp"}));
        cmd->add_option("--scale", spec.scale, "weight scale for wcnf exports");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        spec.command = app.get_subcommands().front()->get_name();
        Session session(spec);
        if (spec.command == "predict") return cmd_predict(session);
        if (spec.command == "max-iaxp") return cmd_max_iaxp(session);
        if (spec.command == "export") return cmd_export(session);
        return cmd_explain(session);
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const CapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModel;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModel;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
