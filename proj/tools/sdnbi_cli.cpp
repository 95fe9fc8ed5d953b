// Command line harness for the toolkit: run one engine on one problem,
// generate best known reference fronts, and compare finished runs side by
// side. Artifacts are plain CSV and JSON so downstream plotting needs no
// bindings.

#include <sdnbi/engines.hpp>
#include <sdnbi/metrics.hpp>
#include <sdnbi/problems.hpp>
#include <sdnbi/reference.hpp>
#include <sdnbi/report.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string timestamp_utc() {
    const std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// key=value lines, blank lines and # comments allowed; keys use the flag
// names without the leading dashes
std::map<std::string, std::string> read_config_file(const std::string& path,
                                                    const std::set<std::string>& allowed) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("bad config line (want key=value): " + line);
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (!allowed.count(key)) throw std::invalid_argument("unknown config key: " + key);
        kv[key] = value;
    }
    return kv;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + p.string());
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("missing run artifacts: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double config_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for " + key + ": " + value);
    }
}

int config_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for " + key + ": " + value);
    }
}

std::uint64_t config_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for " + key + ": " + value);
    }
}

struct CommonArgs {
    std::string problem;
    std::string algo;
    std::string out = ".";
    std::string config_path;
    double eps = 0.0;
    int max_iters = 0;
    int n_beta = 0;
    int n_starts = 0;
    int n_finite = 0;
    std::uint64_t seed = 7;
    bool have_eps = false;
    bool have_max_iters = false;
    bool have_n_beta = false;
    bool have_n_starts = false;
    bool have_n_finite = false;
};

// Applies config file values for everything the command line left unset.
void merge_config(CLI::App* cmd, CommonArgs& a, const std::set<std::string>& allowed) {
    if (a.config_path.empty()) return;
    const auto kv = read_config_file(a.config_path, allowed);
    auto unset = [&](const char* flag) { return cmd->count(flag) == 0; };
    for (const auto& [key, value] : kv) {
        if (key == "problem") {
            if (unset("--problem")) a.problem = value;
        } else if (key == "algo") {
            if (unset("--algo")) a.algo = value;
        } else if (key == "out") {
            if (unset("--out")) a.out = value;
        } else if (key == "eps") {
            if (unset("--eps")) {
                a.eps = config_double(key, value);
                a.have_eps = true;
            }
        } else if (key == "max-iters") {
            if (unset("--max-iters")) {
                a.max_iters = config_int(key, value);
                a.have_max_iters = true;
            }
        } else if (key == "n-beta") {
            if (unset("--n-beta")) {
                a.n_beta = config_int(key, value);
                a.have_n_beta = true;
            }
        } else if (key == "n-starts") {
            if (unset("--n-starts")) {
                a.n_starts = config_int(key, value);
                a.have_n_starts = true;
            }
        } else if (key == "n-finite") {
            if (unset("--n-finite")) {
                a.n_finite = config_int(key, value);
                a.have_n_finite = true;
            }
        } else if (key == "seed") {
            if (unset("--seed")) a.seed = config_u64(key, value);
        }
    }
}

int cmd_run(CLI::App* cmd, CommonArgs& a) {
    merge_config(cmd, a,
                 {"problem", "algo", "eps", "max-iters", "n-beta", "n-starts", "seed", "out"});
    if (a.problem.empty()) throw std::invalid_argument("a problem must be named (--problem)");
    if (a.algo.empty()) throw std::invalid_argument("an algorithm must be named (--algo)");
    if (!a.have_eps && !a.have_max_iters) {
        throw std::invalid_argument("give --eps or --max-iters (or both)");
    }

    const sdnbi::ProblemSpec spec = sdnbi::make_problem(a.problem);
    const sdnbi::ProblemDefaults d = sdnbi::problem_defaults(a.problem);
    sdnbi::EngineConfig config;
    config.algorithm = sdnbi::algorithm_from_name(a.algo);
    config.epsilon = a.have_eps ? a.eps : d.eps;
    config.max_iters = a.have_max_iters ? a.max_iters : d.max_iters;
    config.n_beta = a.have_n_beta ? a.n_beta : d.n_beta;
    config.solver.n_starts = a.have_n_starts ? a.n_starts : d.n_starts;
    config.seed = a.seed;

    const std::string started = timestamp_utc();
    const sdnbi::EngineResult r = sdnbi::run_engine(spec, config);
    const std::string finished = timestamp_utc();

    double t_total = 0.0;
    for (const auto& rec : r.iterations) t_total += rec.elapsed;
    const sdnbi::MetricReport m = sdnbi::make_report(r.archive, {1.0, 1.0}, r.bounds, t_total);

    const fs::path out_dir(a.out);
    fs::create_directories(out_dir);
    write_file(out_dir / "front.csv", sdnbi::front_csv(spec, r));
    write_file(out_dir / "iterations.csv", sdnbi::iterations_csv(r));
    write_file(out_dir / "metrics.json", sdnbi::metrics_json(a.problem, a.algo, r, m));
    write_file(out_dir / "manifest.json",
               sdnbi::manifest_json(a.problem, config,
                                    {"front.csv", "iterations.csv", "metrics.json",
                                     "manifest.json"},
                                    started, finished));

    std::printf("%-8s %-6s %5zu %10.4f %10.4f %5zu %-12s %10.3f\n", a.problem.c_str(),
                a.algo.c_str(), m.n_unq, m.hv, m.dm, r.iterations.size(),
                r.termination.c_str(), m.t_total);
    return 0;
}

int cmd_reference(CLI::App* cmd, CommonArgs& a) {
    merge_config(cmd, a, {"problem", "n-finite", "n-starts", "seed", "out"});
    if (a.problem.empty()) throw std::invalid_argument("a problem must be named (--problem)");

    const sdnbi::ProblemSpec spec = sdnbi::make_problem(a.problem);
    const sdnbi::ProblemDefaults d = sdnbi::problem_defaults(a.problem);
    sdnbi::SolverConfig scfg;
    scfg.n_starts = a.have_n_starts ? a.n_starts : d.n_starts;
    scfg.seed = a.seed;
    const std::size_t n_finite =
        static_cast<std::size_t>(a.have_n_finite ? a.n_finite : d.n_finite);

    const sdnbi::ReferenceFront f = sdnbi::reference_front(spec, n_finite, scfg);
    const sdnbi::MetricReport m = sdnbi::make_report(f.archive, {1.0, 1.0}, f.bounds, 0.0);

    const fs::path out_dir(a.out);
    fs::create_directories(out_dir);
    write_file(out_dir / "reference_front.csv", sdnbi::reference_csv(spec, f));
    write_file(out_dir / "reference_metrics.json",
               sdnbi::reference_metrics_json(a.problem, f, m));

    std::printf("%-8s %-6s %5zu %10.4f %10.4f\n", a.problem.c_str(), "ref", m.n_unq, m.hv,
                m.dm);
    return 0;
}

struct LoadedRun {
    std::string dir;
    std::string problem;
    std::string algorithm;
    std::string termination;
    std::size_t n_iters = 0;
    sdnbi::MetricReport metrics;
    sdnbi::ObjectiveBounds bounds;
    std::vector<sdnbi::FrontRow> rows;
};

LoadedRun load_run(const std::string& dir) {
    LoadedRun run;
    run.dir = dir;
    run.rows = sdnbi::parse_front_csv(read_file(fs::path(dir) / "front.csv"));
    const nlohmann::json mj = nlohmann::json::parse(read_file(fs::path(dir) / "metrics.json"));
    run.problem = mj.at("problem").get<std::string>();
    run.algorithm = mj.at("algorithm").get<std::string>();
    run.termination = mj.at("termination").get<std::string>();
    run.n_iters = mj.at("n_iters").get<std::size_t>();
    run.metrics.n_unq = mj.at("n_unq").get<std::size_t>();
    run.metrics.hv = mj.at("hv").get<double>();
    run.metrics.dm = mj.at("dm").get<double>();
    run.metrics.t_total = mj.at("t_total").get<double>();
    run.metrics.t_avg = mj.at("t_avg").get<double>();
    run.bounds.ideal = {mj.at("bounds").at("ideal").at(0).get<double>(),
                        mj.at("bounds").at("ideal").at(1).get<double>()};
    run.bounds.nadir = {mj.at("bounds").at("nadir").at(0).get<double>(),
                        mj.at("bounds").at("nadir").at(1).get<double>()};
    return run;
}

sdnbi::ParetoArchive rows_to_archive(const std::vector<sdnbi::FrontRow>& rows, int max_iter) {
    sdnbi::ParetoArchive a(1e-6);
    for (const sdnbi::FrontRow& r : rows) {
        if (r.iter_found > max_iter) continue;
        sdnbi::ObjectivePoint p;
        p.raw = r.raw;
        p.z = r.z;
        p.decision = r.decision;
        p.iter_found = r.iter_found;
        a.insert(std::move(p));
    }
    return a;
}

int cmd_compare(const std::vector<std::string>& dirs, const std::string& out) {
    if (dirs.size() < 2) throw std::invalid_argument("compare needs at least two run directories");
    std::vector<LoadedRun> runs;
    for (const std::string& dir : dirs) runs.push_back(load_run(dir));
    for (const LoadedRun& run : runs) {
        if (run.problem != runs.front().problem) {
            throw std::runtime_error("problem mismatch: " + runs.front().problem + " vs " +
                                     run.problem);
        }
    }

    // joint reference point: the worst value of each normalized objective
    // across every compared solution
    sdnbi::Vec2 ref{0.0, 0.0};
    for (const LoadedRun& run : runs) {
        for (const sdnbi::FrontRow& r : run.rows) {
            ref[0] = std::max(ref[0], r.z[0]);
            ref[1] = std::max(ref[1], r.z[1]);
        }
    }

    std::vector<double> joint_hv;
    for (const LoadedRun& run : runs) {
        const sdnbi::ParetoArchive a =
            rows_to_archive(run.rows, std::numeric_limits<int>::max());
        joint_hv.push_back(sdnbi::hypervolume_2d(a, ref));
    }

    // side by side text table
    std::size_t width = 12;
    for (const LoadedRun& run : runs) width = std::max(width, run.dir.size() + 2);
    auto cell = [&](const std::string& s) {
        std::string c = s;
        c.resize(width, ' ');
        return c;
    };
    auto num = [&](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return cell(buf);
    };
    std::string table = cell("metric");
    for (const LoadedRun& run : runs) table += cell(run.dir);
    table += '\n';
    table += cell("algorithm");
    for (const LoadedRun& run : runs) table += cell(run.algorithm);
    table += '\n';
    table += cell("n_unq");
    for (const LoadedRun& run : runs) table += cell(std::to_string(run.metrics.n_unq));
    table += '\n';
    table += cell("hv");
    for (std::size_t i = 0; i < runs.size(); ++i) table += num(joint_hv[i]);
    table += '\n';
    table += cell("dm");
    for (const LoadedRun& run : runs) table += num(run.metrics.dm);
    table += '\n';
    table += cell("t_total");
    for (const LoadedRun& run : runs) table += num(run.metrics.t_total);
    table += '\n';
    table += cell("t_avg");
    for (const LoadedRun& run : runs) table += num(run.metrics.t_avg);
    table += '\n';
    table += cell("n_iters");
    for (const LoadedRun& run : runs) table += cell(std::to_string(run.n_iters));
    table += '\n';
    table += cell("termination");
    for (const LoadedRun& run : runs) table += cell(run.termination);
    table += '\n';
    std::fputs(table.c_str(), stdout);

    std::string metrics_csv =
        "run,problem,algorithm,n_unq,hv,dm,t_total,t_avg,n_iters,termination\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const LoadedRun& run = runs[i];
        metrics_csv += sdnbi::detail::csv_field(run.dir) + ',' + run.problem + ',' +
                       run.algorithm + ',' + std::to_string(run.metrics.n_unq) + ',' +
                       sdnbi::detail::fmt(joint_hv[i]) + ',' +
                       sdnbi::detail::fmt(run.metrics.dm) + ',' +
                       sdnbi::detail::fmt(run.metrics.t_total) + ',' +
                       sdnbi::detail::fmt(run.metrics.t_avg) + ',' +
                       std::to_string(run.n_iters) + ',' + run.termination + '\n';
    }

    // per iteration traces over the archive as it stood after each pass
    std::string traces_csv = "run,iter,n_unq,hv,dm\n";
    for (const LoadedRun& run : runs) {
        for (std::size_t iter = 1; iter <= run.n_iters; ++iter) {
            const sdnbi::ParetoArchive a = rows_to_archive(run.rows, static_cast<int>(iter));
            const double hv = sdnbi::hypervolume_2d(a, ref);
            const double dm =
                a.size() >= 3 ? sdnbi::distribution_metric(a, run.bounds) : 0.0;
            traces_csv += sdnbi::detail::csv_field(run.dir) + ',' + std::to_string(iter) +
                          ',' + std::to_string(a.size()) + ',' + sdnbi::detail::fmt(hv) + ',' +
                          sdnbi::detail::fmt(dm) + '\n';
        }
    }

    const fs::path out_dir(out);
    fs::create_directories(out_dir);
    write_file(out_dir / "compare_metrics.csv", metrics_csv);
    write_file(out_dir / "compare_traces.csv", traces_csv);
    return 0;
}

int cmd_problems() {
    for (const std::string& name : sdnbi::problem_names()) {
        const sdnbi::ProblemDefaults d = sdnbi::problem_defaults(name);
        std::printf("%-6s eps=%g max_iters=%d n_beta=%d n_starts=%d n_finite=%d\n",
                    name.c_str(), d.eps, d.max_iters, d.n_beta, d.n_starts, d.n_finite);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bi-objective Pareto front approximation toolkit"};
    app.require_subcommand(1);

    CommonArgs run_args;
    CLI::App* run = app.add_subcommand("run", "execute one engine on one problem");
    run->add_option("--problem", run_args.problem, "problem name");
    run->add_option("--algo", run_args.algo, "engine: sd, mnbi, or sdnbi");
    run->add_option("--eps", run_args.eps, "termination tolerance on the facet error");
    run->add_option("--max-iters", run_args.max_iters, "iteration budget");
    run->add_option("--n-beta", run_args.n_beta, "grid size of the boundary intersection scan");
    run->add_option("--n-starts", run_args.n_starts, "multistart count per subproblem");
    run->add_option("--seed", run_args.seed, "random seed recorded in the manifest");
    run->add_option("--out", run_args.out, "output directory");
    run->add_option("--config", run_args.config_path, "key=value config file");

    CommonArgs ref_args;
    CLI::App* reference = app.add_subcommand("reference", "generate a best known front");
    reference->add_option("--problem", ref_args.problem, "problem name");
    reference->add_option("--n-finite", ref_args.n_finite, "number of sweep points");
    reference->add_option("--n-starts", ref_args.n_starts, "multistart count per subproblem");
    reference->add_option("--seed", ref_args.seed, "random seed");
    reference->add_option("--out", ref_args.out, "output directory");
    reference->add_option("--config", ref_args.config_path, "key=value config file");

    std::vector<std::string> compare_dirs;
    std::string compare_out = ".";
    CLI::App* compare = app.add_subcommand("compare", "compare finished run directories");
    compare->add_option("dirs", compare_dirs, "run directories (two or more)");
    compare->add_option("--out", compare_out, "output directory");

    CLI::App* problems = app.add_subcommand("problems", "list problems and their defaults");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            run_args.have_eps = run->count("--eps") > 0;
            run_args.have_max_iters = run->count("--max-iters") > 0;
            run_args.have_n_beta = run->count("--n-beta") > 0;
            run_args.have_n_starts = run->count("--n-starts") > 0;
            return cmd_run(run, run_args);
        }
        if (reference->parsed()) {
            ref_args.have_n_finite = reference->count("--n-finite") > 0;
            ref_args.have_n_starts = reference->count("--n-starts") > 0;
            return cmd_reference(reference, ref_args);
        }
        if (compare->parsed()) return cmd_compare(compare_dirs, compare_out);
        if (problems->parsed()) return cmd_problems();
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
