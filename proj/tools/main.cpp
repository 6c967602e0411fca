#include <string>

#include <CLI11.hpp>

#include "phisig/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Common values of Euler's phi and the sum-of-divisors function: "
                 "value-set counts, series constants, linear-form heuristics, "
                 "structured membership, and chain construction"};
    app.require_subcommand(1);

    phisig::RunConfig cfg;
    std::string format;
    app.add_option("--format", format, "Output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--output", cfg.output_path, "Write output to a file");
    app.add_option("--sieve-limit", cfg.sieve_limit,
                   "Prime table size (default: sized from the request)");
    app.add_option("--threads", cfg.threads,
                   "Worker threads (0 = automatic; results are identical)");

    auto param_into = [&cfg](const std::string& key) {
        return [&cfg, key](const std::string& value) { cfg.parameters[key] = value; };
    };

    auto* values = app.add_subcommand("values", "Value-set sizes V_phi, V_sigma and their overlap");
    values->add_option_function<std::string>("--x", param_into("x"),
                                             "Comma-separated x grid (default 10)");

    auto* holder = app.add_subcommand("holder", "Three-fold Holder lower-bound identity check");
    holder->add_option_function<std::string>("--x", param_into("x"),
                                             "Comma-separated x grid (default 1)");

    auto* constants = app.add_subcommand("constants", "Series constants rho, F'(rho), C, D");
    constants->add_option_function<std::string>("--tol", param_into("tol"),
                                                "Series tolerance (default 1e-12)");

    auto* series = app.add_subcommand("series", "Singular series and simultaneous-prime counts");
    series->add_option_function<std::string>("--forms", param_into("forms"),
                                             "Comma-separated forms like 1*n+0,1*n+2");
    series->add_option_function<std::string>("--forms-file", param_into("forms_file"),
                                             "JSON file with [[a,b],...] entries");
    series->add_option_function<std::string>("--x", param_into("x"),
                                             "Count range bound (default 100000)");
    series->add_option_function<std::string>("--prime-bound", param_into("prime_bound"),
                                             "Euler product truncation (default 100000)");

    auto* membership = app.add_subcommand("membership", "Structured-set membership reports");
    membership->add_option_function<std::string>("--function", param_into("function"),
                                                 "phi or sigma (default phi)");
    membership->add_option_function<std::string>("--alpha", param_into("alpha"),
                                                 "Level exponent (default 0.54)");
    membership->add_option_function<std::string>("--k", param_into("k"),
                                                 "Number of prime factors (default 2)");
    membership->add_option_function<std::string>("--x", param_into("x"),
                                                 "Value ceiling (default 1000000)");
    membership->add_option_function<std::string>("--mode", param_into("mode"),
                                                 "strict or relaxed (default strict)");
    membership->add_option_function<std::string>("--levels", param_into("levels"),
                                                 "Relaxed levels v_0,...,v_k");
    membership->add_option_function<std::string>("--from", param_into("from"),
                                                 "Scan start (default 2)");
    membership->add_option_function<std::string>("--to", param_into("to"),
                                                 "Scan end (default 200)");

    auto* construct = app.add_subcommand("construct", "Chain construction of phi/sigma coincidences");
    construct->add_option_function<std::string>("--k", param_into("k"),
                                                "Number of prime factors (default 2)");
    construct->add_option_function<std::string>("--mode", param_into("mode"),
                                                "strict or relaxed (default strict)");
    construct->add_option_function<std::string>("--alpha", param_into("alpha"),
                                                "Level exponent (default 0.54)");
    construct->add_option_function<std::string>("--x", param_into("x"),
                                                "Value ceiling (default 1000000)");
    construct->add_option_function<std::string>("--levels", param_into("levels"),
                                                "Relaxed levels v_0,...,v_k");
    for (unsigned level = 1; level <= 8; ++level) {
        std::string flag = "--q" + std::to_string(level) + "-window";
        std::string key = "q" + std::to_string(level);
        construct->add_option_function<std::string>(
            flag, param_into(key),
            "Inclusive prime window lo:hi for the level-" + std::to_string(level) +
                " step (relaxed mode)");
    }
    construct->add_option_function<std::string>("--max-t", param_into("max_t"),
                                                "Budget: t candidates per level (default 256)");
    construct->add_option_function<std::string>("--max-q", param_into("max_q"),
                                                "Budget: Q candidates per level (default 4096)");
    construct->add_option_function<std::string>("--max-outputs", param_into("max_outputs"),
                                                "Budget: emitted solutions (default 1024)");

    auto* lemmas = app.add_subcommand(
        "lemmas", "Exhaustive verification grid for the supporting lemmas");

    auto* twins = app.add_subcommand("twins", "Twin-prime common values sigma(p) = phi(p+2)");
    twins->add_option_function<std::string>("--x", param_into("x"),
                                            "Upper bound on p (default 1000)");

    for (CLI::App* sub : {values, holder, constants, series, membership,
                          construct, lemmas, twins})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? phisig::kExitOk : phisig::kExitUsage;
    }

    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (format == "json") cfg.format = phisig::OutputFormat::json;
    if (format == "csv") cfg.format = phisig::OutputFormat::csv;
    return phisig::run(cfg);
}
