#include "gaussdiv/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "gaussdiv/io.hpp"

namespace gaussdiv::cli {

using nlohmann::json;

namespace {

struct Output {
    std::string content;
    int code = kOk;
};

void add_common_options(CLI::App & cmd, RunConfig & cfg)
{
    cmd.add_option("input", cfg.input, "input JSON file")->required();
    cmd.add_option("--grid", cfg.grid, "sample grid size N")->capture_default_str();
    cmd.add_option("--tol", cfg.tol, "eigenvalue tolerance")->capture_default_str();
    cmd.add_option("--margin", cfg.margin, "region boundary margin")->capture_default_str();
    cmd.add_option("--tau", cfg.tau, "intermediate-map step")->capture_default_str();
    cmd.add_option("--fd-step", cfg.fd_step, "finite-difference step")->capture_default_str();
    cmd.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    cmd.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    cmd.add_option("--out", cfg.out, "output path (written atomically)");
}

void validate(const RunConfig & cfg)
{
    if (cfg.grid < 2)
        throw InvalidArgument("--grid must be >= 2");
    for (const double v : {cfg.tol, cfg.margin, cfg.tau, cfg.fd_step})
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidArgument("--tol, --margin, --tau and --fd-step must be positive");
}

std::string dump(const json & doc)
{
    return doc.dump(2) + "\n";
}

const std::string & format_or(const RunConfig & cfg, const std::string & fallback)
{
    return cfg.format.empty() ? fallback : cfg.format;
}

Output check_channel(const RunConfig & cfg, std::ostream & err)
{
    const GaussianMap<double> map = io::parse_channel(io::read_json_file(cfg.input));
    VerdictOptions opts;
    opts.tol = cfg.tol;
    opts.seed = cfg.seed;
    opts.scan.threads = cfg.threads;
    const PositivityVerdict verdict = classify_channel(map, opts);
    if (verdict.falsifier_only)
        err << "note: positivity for n >= 2 is falsifier-only\n";
    if (format_or(cfg, "json") == "json")
        return {dump(io::verdict_json(verdict))};
    return {"class,cp_margin,p_margin,p_method\n" + std::string(to_string(verdict.klass)) + ',' +
            io::format_double(verdict.cp_margin) + ',' + io::format_double(verdict.p_margin) + ',' +
            (verdict.falsifier_only ? "falsifier-only" : "scan") + '\n'};
}

struct Physicality {
    bool physical = true;
    std::optional<double> violation_time;
};

// Global CP of (X_t, Y_t) at the nodes (i + 1) T / N.
Physicality global_physicality(const io::ProcessSpec & spec, const RunConfig & cfg)
{
    if (spec.rates) {
        const PhysicalityReport report = is_physical(*spec.rates, cfg.grid, cfg.tol);
        return {report.physical, report.violation_time};
    }
    const double horizon = spec.process.horizon();
    for (int i = 0; i < cfg.grid; ++i) {
        const double t = horizon * (i + 1) / cfg.grid;
        if (!is_cp(spec.process.at(t), cfg.tol).ok)
            return {false, t};
    }
    return {};
}

ClassifyOptions classify_options(const RunConfig & cfg)
{
    ClassifyOptions opts;
    opts.grid = cfg.grid;
    opts.margin = cfg.margin;
    opts.fd_step = cfg.fd_step;
    opts.threads = cfg.threads;
    return opts;
}

void report_unphysical(const Physicality & phys, std::ostream & err)
{
    err << "globally unphysical: complete positivity fails";
    if (phys.violation_time)
        err << " at t = " << io::format_double(*phys.violation_time);
    err << '\n';
}

Output classify(const RunConfig & cfg, std::ostream & err)
{
    const io::ProcessSpec spec = io::parse_process(io::read_json_file(cfg.input));
    const Physicality phys = global_physicality(spec, cfg);
    const DivisibilityReport report = classify_process(spec.process, classify_options(cfg));
    Output result;
    if (format_or(cfg, "json") == "json") {
        json doc = io::report_json(report);
        doc["physical"] = phys.physical;
        doc["violation_time"] = phys.violation_time ? json(*phys.violation_time) : json(nullptr);
        result.content = dump(doc);
    } else {
        result.content = io::trajectory_csv(report.samples);
    }
    if (!phys.physical) {
        report_unphysical(phys, err);
        result.code = kUnphysical;
    }
    return result;
}

Output trajectory_cmd(const RunConfig & cfg, std::ostream & err)
{
    const io::ProcessSpec spec = io::parse_process(io::read_json_file(cfg.input));
    const Physicality phys = global_physicality(spec, cfg);
    const std::vector<RateSample> samples = trajectory(spec.process, classify_options(cfg));
    Output result;
    if (format_or(cfg, "csv") == "csv") {
        result.content = io::trajectory_csv(samples);
    } else {
        DivisibilityReport shell{samples, {}, ProcessClass::Markovian};
        result.content = dump(json{{"samples", io::report_json(shell).at("samples")}});
    }
    if (!phys.physical) {
        report_unphysical(phys, err);
        result.code = kUnphysical;
    }
    return result;
}

const RateProfile & require_rates(const io::ProcessSpec & spec, const char * command)
{
    if (!spec.rates)
        throw Unsupported(std::string(command) + " needs a rate-generated process (rates, damping or qbm)");
    return *spec.rates;
}

Output physicality(const RunConfig & cfg, std::ostream & err)
{
    const io::ProcessSpec spec = io::parse_process(io::read_json_file(cfg.input));
    const PhysicalityReport report = is_physical(require_rates(spec, "physicality"), cfg.grid, cfg.tol);
    Output result;
    result.content = format_or(cfg, "csv") == "csv" ? io::physicality_csv(report) : dump(io::physicality_json(report));
    if (!report.physical) {
        report_unphysical({false, report.violation_time}, err);
        result.code = kUnphysical;
    }
    return result;
}

Output amplification(const RunConfig & cfg, std::ostream &)
{
    const io::ProcessSpec spec = io::parse_process(io::read_json_file(cfg.input));
    const auto windows = amplification_windows(require_rates(spec, "amplification"), cfg.grid);
    if (format_or(cfg, "json") == "json")
        return {dump(io::windows_json(windows))};
    return {io::windows_csv(windows)};
}

Output dispatch(const RunConfig & cfg, std::ostream & err)
{
    if (cfg.command == "check-channel")
        return check_channel(cfg, err);
    if (cfg.command == "classify-process")
        return classify(cfg, err);
    if (cfg.command == "trajectory")
        return trajectory_cmd(cfg, err);
    if (cfg.command == "physicality")
        return physicality(cfg, err);
    return amplification(cfg, err);
}

} // namespace

unsigned threads_from_env()
{
    const char * value = std::getenv("GAUSSDIV_THREADS");
    if (value == nullptr || *value == '\0')
        return 0;
    char * end = nullptr;
    const unsigned long parsed = std::strtoul(value, &end, 10);
    if (*end != '\0')
        throw InvalidArgument("GAUSSDIV_THREADS must be a non-negative integer");
    return static_cast<unsigned>(parsed);
}

int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
    RunConfig cfg;
    CLI::App app{"Divisibility classes of Gaussian quantum processes", "gaussdiv"};
    app.require_subcommand(1);
    const std::pair<const char *, const char *> commands[] = {
        {"check-channel", "classify a Gaussian map as CP, P_not_CP or NP"},
        {"classify-process", "Markovian / weak / strong classification with crossings"},
        {"trajectory", "sampled (eps, mu) path as CSV"},
        {"physicality", "global complete positivity table of a rate-generated process"},
        {"amplification", "windows of amplification beyond the quantum limit"},
    };
    for (const auto & [name, help] : commands) {
        CLI::App * cmd = app.add_subcommand(name, help);
        add_common_options(*cmd, cfg);
        cmd->callback([&cfg, name = std::string(name)] { cfg.command = name; });
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp & e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp & e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError & e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    }

    try {
        validate(cfg);
        cfg.threads = threads_from_env();
        const Output result = dispatch(cfg, err);
        if (cfg.out.empty())
            out << result.content;
        else
            io::write_atomically(cfg.out, result.content);
        return result.code;
    } catch (const SingularMapError & e) {
        err << "numerical failure at t = " << io::format_double(e.time()) << ": " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const NumericalFailure & e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const nlohmann::json::exception & e) {
        err << "error: malformed input: " << e.what() << '\n';
        return kBadInput;
    } catch (const std::exception & e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    }
}

} // namespace gaussdiv::cli
