#include "macelast/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace macelast::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kStudyKeys{"name",  "case", "dims", "lambda", "mu", "base_cells",
                                       "levels", "mesh", "solver", "compare"};

template <class T>
T get(const json& obj, const std::string& key, const std::string& where, const T& fallback)
{
    if (!obj.contains(key)) {
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": key '" + key + "' has the wrong type");
    }
}

template <class T>
T require(const json& obj, const std::string& key, const std::string& where)
{
    if (!obj.contains(key)) {
        throw ConfigError(where + ": missing key '" + key + "'");
    }
    return get<T>(obj, key, where, T{});
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    for (const auto& [k, v] : obj.items()) {
        if (!allowed.count(k)) {
            throw ConfigError(where + ": unknown key '" + k + "'");
        }
    }
}

MeshMode parse_mesh(const json& j, const std::string& where)
{
    if (!j.is_object()) {
        throw ConfigError(where + ": 'mesh' must be an object");
    }
    check_keys(j, {"mode", "seed", "amplitude"}, where + ".mesh");
    const auto mode = get<std::string>(j, "mode", where + ".mesh", "uniform");
    if (mode == "uniform") {
        return MeshMode::uniform();
    }
    if (mode != "perturbed") {
        throw ConfigError(where + ".mesh: mode must be 'uniform' or 'perturbed', got '" + mode + "'");
    }
    const auto seed = get<std::uint64_t>(j, "seed", where + ".mesh", 0);
    const auto amp = get<double>(j, "amplitude", where + ".mesh", 0.3);
    if (!(amp >= 0.0 && amp < 0.5)) {
        throw ConfigError(where + ".mesh: amplitude must lie in [0, 0.5)");
    }
    return MeshMode::perturbed(seed, amp);
}

SolverOptions parse_solver(const json& j, const std::string& where)
{
    if (!j.is_object()) {
        throw ConfigError(where + ": 'solver' must be an object");
    }
    check_keys(j, {"backend", "tol", "max_iterations", "direct_limit"}, where + ".solver");
    SolverOptions o;
    try {
        o.backend = parse_backend(get<std::string>(j, "backend", where, "auto"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ".solver: " + e.what());
    }
    o.tol = get<double>(j, "tol", where + ".solver", o.tol);
    o.max_iterations = get<int>(j, "max_iterations", where + ".solver", o.max_iterations);
    o.direct_limit = get<std::size_t>(j, "direct_limit", where + ".solver", o.direct_limit);
    if (!(o.tol > 0.0) || o.max_iterations < 1) {
        throw ConfigError(where + ".solver: tol and max_iterations must be positive");
    }
    return o;
}

ReferenceCheck parse_check(const json& j, const std::string& where)
{
    ReferenceCheck c;
    if (j.is_string()) {
        c.reference = j.get<std::string>();
        return c;
    }
    if (!j.is_object()) {
        throw ConfigError(where + ": compare entries must be strings or objects");
    }
    check_keys(j, {"reference", "error_tol", "rate_tol", "allow_missing"}, where);
    c.reference = require<std::string>(j, "reference", where);
    c.options.error_tol = get<double>(j, "error_tol", where, c.options.error_tol);
    c.options.rate_tol = get<double>(j, "rate_tol", where, c.options.rate_tol);
    c.options.allow_missing = get<bool>(j, "allow_missing", where, c.options.allow_missing);
    return c;
}

StudyConfig parse_study(const json& j, std::size_t index)
{
    std::string where = "studies[" + std::to_string(index) + "]";
    if (!j.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    check_keys(j, kStudyKeys, where);
    StudyConfig s;
    s.name = require<std::string>(j, "name", where);
    where += " (" + s.name + ")";
    if (s.name.empty() || !std::all_of(s.name.begin(), s.name.end(), [](unsigned char c) {
            return std::isalnum(c) || c == '_' || c == '-' || c == '.';
        })) {
        throw ConfigError(where + ": name may only contain letters, digits, '_', '-' and '.'");
    }
    s.case_name = require<std::string>(j, "case", where);
    s.lambda = require<double>(j, "lambda", where);
    s.mu = get<double>(j, "mu", where, 1.0);
    try {
        const auto c = ManufacturedCase::by_name(s.case_name, s.lambda, s.mu);
        if (j.contains("dims") && get<int>(j, "dims", where, 0) != c.dims()) {
            throw ConfigError(where + ": case '" + s.case_name + "' is " + std::to_string(c.dims()) + "D");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    const auto cells = get<long long>(j, "base_cells", where, 8);
    s.levels = get<int>(j, "levels", where, 1);
    if (cells < 1 || s.levels < 1) {
        throw ConfigError(where + ": base_cells and levels must be positive");
    }
    s.base_cells = static_cast<std::size_t>(cells);
    if (j.contains("mesh")) s.mesh = parse_mesh(j.at("mesh"), where);
    if (j.contains("solver")) s.solver = parse_solver(j.at("solver"), where);
    if (j.contains("compare")) {
        const auto& cmp = j.at("compare");
        if (cmp.is_array()) {
            for (std::size_t i = 0; i < cmp.size(); ++i) {
                s.compare.push_back(parse_check(cmp[i], where + ".compare[" + std::to_string(i) + "]"));
            }
        } else {
            s.compare.push_back(parse_check(cmp, where + ".compare"));
        }
    }
    return s;
}

ResultTable resolve_reference(const std::string& ref)
{
    const auto names = reference_names();
    if (std::find(names.begin(), names.end(), ref) != names.end()) {
        return reference_table(ref);
    }
    return ResultTable::load(ref);
}

std::string stem_of(const std::string& ref)
{
    return std::filesystem::path(ref).stem().string();
}

void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream os(p, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot write '" + p.string() + "'");
    }
    os << text;
}

struct StudyOutcome {
    int code = kOk;
    std::string log;
};

StudyOutcome run_study(const StudyConfig& s, const std::filesystem::path& dir, bool verbose)
{
    StudyOutcome res;
    std::ostringstream log;
    const auto c = ManufacturedCase::by_name(s.case_name, s.lambda, s.mu);
    const auto report = convergence_study(c, s.base_cells, s.levels, s.mesh, s.solver);

    std::ostringstream csv;
    write_csv(csv, report);
    std::ostringstream csv_interp;
    write_csv(csv_interp, report, ConvergenceReport::Target::kInterpolant);
    std::ostringstream md;
    write_markdown(md, report);
    md << '\n';
    write_markdown(md, report, ConvergenceReport::Target::kInterpolant);
    write_file(dir / (s.name + ".csv"), csv.str());
    write_file(dir / (s.name + "_interpolant.csv"), csv_interp.str());
    write_file(dir / (s.name + ".md"), md.str());

    log << "study " << s.name << ": " << c.name() << ", " << c.dims() << "D, lambda=" << s.lambda << ", mu=" << s.mu
        << ", " << s.mesh.describe() << '\n';
    for (const auto& lv : report.levels) {
        log << "  level " << lv.level << " (" << lv.cells[0] << " cells/axis, " << lv.unknowns << " unknowns): ";
        if (lv.ok) {
            log << lv.backend << ", residual " << lv.residual;
        } else {
            log << "FAILED: " << lv.failure;
            res.code = kSolverFailure;
        }
        if (verbose) {
            log << ", " << lv.iterations << " iterations, " << lv.seconds << " s";
        }
        log << '\n';
    }
    const std::size_t last = report.levels.size() - 1;
    for (const auto& comp : component_names(c.dims())) {
        const auto e = report.error(comp, last);
        const auto r = report.rate(comp, last);
        log << "  " << comp << ": finest error ";
        if (e) {
            log << std::scientific << std::setprecision(3) << *e << std::defaultfloat;
        } else {
            log << "n/a";
        }
        log << ", rate ";
        if (r) {
            log << std::fixed << std::setprecision(3) << *r << std::defaultfloat;
        } else {
            log << "n/a";
        }
        log << std::setprecision(6) << '\n';
    }

    const auto produced = ResultTable::parse(csv.str());
    for (const auto& chk : s.compare) {
        CompareResult cmp;
        try {
            cmp = compare(produced, resolve_reference(chk.reference), chk.options);
        } catch (const std::exception& e) {
            throw ConfigError("study " + s.name + ": compare against '" + chk.reference + "': " + e.what());
        }
        std::ostringstream out;
        cmp.write(out);
        write_file(dir / (s.name + "_compare_" + stem_of(chk.reference) + ".csv"), out.str());
        log << "  compare " << chk.reference << ": " << (cmp.pass ? "pass" : "FAIL") << " (" << cmp.checks.size()
            << " cells)\n";
        for (const auto& f : cmp.failures) {
            log << "    " << f << '\n';
        }
        if (!cmp.pass && res.code == kOk) {
            res.code = kCompareFailure;
        }
    }
    res.log = log.str();
    return res;
}

}  // namespace

RunConfig parse_config(const std::string& text)
{
    json j;
    try {
        j = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    check_keys(j, {"output_dir", "threads", "studies"}, "config");
    RunConfig cfg;
    cfg.output_dir = get<std::string>(j, "output_dir", "config", cfg.output_dir);
    cfg.threads = get<int>(j, "threads", "config", cfg.threads);
    if (cfg.threads < 1) {
        throw ConfigError("config: threads must be at least 1");
    }
    if (!j.contains("studies") || !j.at("studies").is_array() || j.at("studies").empty()) {
        throw ConfigError("config: 'studies' must be a non-empty array");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < j.at("studies").size(); ++i) {
        cfg.studies.push_back(parse_study(j.at("studies")[i], i));
        if (!names.insert(cfg.studies.back().name).second) {
            throw ConfigError("config: duplicate study name '" + cfg.studies.back().name + "'");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is) {
        throw ConfigError("cannot open config '" + path + "'");
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

int thread_override(int fallback)
{
    const char* env = std::getenv("MACELAST_THREADS");
    if (env == nullptr || *env == '\0') {
        return fallback;
    }
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) {
        throw ConfigError(std::string("MACELAST_THREADS must be a positive integer, got '") + env + "'");
    }
    return static_cast<int>(v);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err, bool verbose)
{
    const std::filesystem::path dir(config.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        err << "error: cannot create output directory '" << dir.string() << "': " << ec.message() << '\n';
        return kUsage;
    }

    std::vector<StudyOutcome> outcomes(config.studies.size());
    std::vector<std::string> fatal(config.studies.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < config.studies.size(); i = next++) {
            try {
                outcomes[i] = run_study(config.studies[i], dir, verbose);
            } catch (const std::exception& e) {
                fatal[i] = e.what();
            }
        }
    };
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), config.studies.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < workers; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }

    bool usage = false;
    bool solver_failed = false;
    bool compare_failed = false;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (!fatal[i].empty()) {
            err << "error: study " << config.studies[i].name << ": " << fatal[i] << '\n';
            usage = true;
            continue;
        }
        out << outcomes[i].log;
        solver_failed |= outcomes[i].code == kSolverFailure;
        compare_failed |= outcomes[i].code == kCompareFailure;
    }
    out << "wrote results to " << dir.string() << '\n';
    if (usage) return kUsage;
    if (solver_failed) return kSolverFailure;
    return compare_failed ? kCompareFailure : kOk;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"MAC scheme solver for linear elasticity: convergence studies and table comparison", "macelast"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    bool verbose = false;
    auto* run_cmd = app.add_subcommand("run", "run the convergence studies of a JSON config");
    run_cmd->add_option("config", config_path, "config file")->required();
    run_cmd->add_option("-o,--output-dir", output_dir, "override the config's output directory");
    run_cmd->add_flag("-v,--verbose", verbose, "print iteration counts and timings");

    std::string produced_path;
    std::string reference;
    CompareOptions opts;
    auto* cmp_cmd = app.add_subcommand("compare", "compare a produced CSV table against a reference table");
    cmp_cmd->add_option("produced", produced_path, "produced CSV")->required();
    cmp_cmd->add_option("reference", reference, "embedded table name (e.g. table6_3) or CSV path")->required();
    cmp_cmd->add_option("--error-tol", opts.error_tol, "relative tolerance on error cells")->capture_default_str();
    cmp_cmd->add_option("--rate-tol", opts.rate_tol, "absolute tolerance on rate cells")->capture_default_str();
    cmp_cmd->add_flag("--allow-missing", opts.allow_missing, "skip reference rows absent from the produced table");

    app.add_subcommand("references", "list the embedded reference tables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*run_cmd) {
            RunConfig cfg = load_config(config_path);
            if (!output_dir.empty()) cfg.output_dir = output_dir;
            cfg.threads = thread_override(cfg.threads);
            return run(cfg, out, err, verbose);
        }
        if (*cmp_cmd) {
            const auto produced = ResultTable::load(produced_path);
            const auto ref = resolve_reference(reference);
            const auto res = compare(produced, ref, opts);
            res.write(out);
            return res.pass ? kOk : kCompareFailure;
        }
        for (const auto& n : reference_names()) {
            out << n << '\n';
        }
        return kOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace macelast::cli
