#include "vulnrank/cli.hpp"

#include <optional>

#include <CLI11.hpp>

#include "vulnrank/project.hpp"

namespace vulnrank::cli {

namespace {

struct Options {
    std::string config;
    std::string org;
    std::string policy;
    int k{0};
    std::string from;
    std::string to;
    std::string out;
};

void add_common(CLI::App& cmd, Options& o)
{
    cmd.add_option("--config", o.config, "project configuration JSON")->required();
    cmd.add_option("--k", o.k, "ranking cutoff")->check(CLI::PositiveNumber);
    cmd.add_option("--from", o.from, "first modification date (YYYY-MM-DD)");
    cmd.add_option("--to", o.to, "last modification date (YYYY-MM-DD)");
    cmd.add_option("--out", o.out, "output directory");
}

ProjectConfig load_config(const Options& o)
{
    auto config = ProjectConfig::load(o.config);
    if (o.k > 0) {
        config.policy.k = o.k;
    }
    auto date = [](const std::string& text, const char* flag) {
        auto d = Date::parse(text);
        if (!d) {
            throw UsageError(std::string(flag) + ": expected YYYY-MM-DD, got '" + text + "'");
        }
        return *d;
    };
    if (!o.from.empty()) {
        config.date_range.from = date(o.from, "--from");
    }
    if (!o.to.empty()) {
        config.date_range.to = date(o.to, "--to");
    }
    if (config.date_range.to < config.date_range.from) {
        throw UsageError("--to precedes --from");
    }
    if (!o.out.empty()) {
        config.output_dir = o.out;
    }
    return config;
}

void report(const StageOutput& result, std::ostream& out, std::ostream& err)
{
    for (const auto& w : result.warnings) {
        err << "warning: " << w << '\n';
    }
    for (const auto& p : result.written) {
        out << "wrote " << p.string() << '\n';
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Threat-informed vulnerability prioritization", "vulnrank"};
    app.require_subcommand(1);
    Options o;
    auto* ingest = app.add_subcommand("ingest", "validate and normalize feed snapshots");
    auto* build = app.add_subcommand("build", "enrich groups, resolve profiles, build the graph");
    auto* rank_cmd = app.add_subcommand("rank", "rank weekly candidate cohorts");
    auto* evaluate = app.add_subcommand("evaluate", "nDCG, patch cost and t-test reports");
    auto* case_study = app.add_subcommand("case-study", "side-by-side CVSS vs threat ranking table");
    for (auto* cmd : {ingest, build, rank_cmd, evaluate, case_study}) {
        add_common(*cmd, o);
    }
    for (auto* cmd : {rank_cmd, evaluate, case_study}) {
        cmd->add_option("--org", o.org, "organization id (default: all)");
    }
    rank_cmd->add_option("--policy", o.policy, "cvss_base | apt_threat | general_threat | ideal");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    if (!argv.empty()) {
        argv.pop_back();
    }
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    const std::optional<std::string> org = o.org.empty() ? std::nullopt : std::optional{o.org};
    try {
        const auto config = load_config(o);
        if (ingest->parsed()) {
            report(run_ingest(config), out, err);
        } else if (build->parsed()) {
            report(run_build(config), out, err);
        } else if (rank_cmd->parsed()) {
            std::optional<Policy> policy;
            if (!o.policy.empty()) {
                policy = parse_policy(o.policy);
                if (!policy) {
                    throw UsageError("unknown policy: " + o.policy);
                }
            }
            report(run_rank(config, org, policy), out, err);
        } else if (evaluate->parsed()) {
            report(run_evaluate(config, org), out, err);
        } else {
            report(run_case_study(config, org, out), out, err);
        }
    } catch (const MissingInputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

}  // namespace vulnrank::cli
