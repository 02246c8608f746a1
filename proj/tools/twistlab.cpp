#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "twistlab/cli.hpp"

namespace {

std::string flag_name(const std::string &key) { return key == "family" ? "--family" : "--" + key; }

void emit(const std::string &path, const std::string &text)
{
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        std::fflush(stdout);
    }
    else {
        twistlab::write_text_file(path, text);
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"twistlab: rotation numbers, twist intervals and rotation sets of annulus twist maps"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string seed;
    std::string threads;
    std::string out;
    app.add_option("--config", config_path, "configuration file ([section] key = value)");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--threads", threads, "worker threads (0 = all cores; env TWISTLAB_THREADS)");
    app.add_option("--out", out, "output path (default: stdout)");

    // Every configuration key is also a flag; flags override the file.
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option *> options;
    std::map<std::string, CLI::App *> subs;
    const std::map<std::string, std::string> help{
        {"rotnum", "rotation number of a circle family or an annulus boundary"},
        {"twist-interval", "boundary rotation numbers and the separation verdict"},
        {"rotation-set", "sampled rotation set (JSON summary, CSV samples via --csv)"},
        {"phase-portrait", "orbit dump as CSV"},
        {"tongue", "mode-locking parameter interval"},
        {"curves", "trace two invariant-curve candidates and compare rotation numbers"},
        {"recurrence", "recurrence scan over a grid (JSON summary, CSV via --csv)"},
        {"verify", "run the claims table"},
    };
    for (const auto &[name, _] : twistlab::commands()) {
        CLI::App *sub = app.add_subcommand(name, help.at(name));
        subs[name] = sub;
        for (const auto &[section, keys] : twistlab::config_schema()) {
            for (const auto &key : keys) {
                if (key == "seed" || key == "threads" || key == "out") {
                    continue;
                }
                std::string flag = flag_name(key);
                std::replace(flag.begin(), flag.end(), '_', '-');
                options[name + "/" + key] = sub->add_option(flag, values[name + "/" + key]);
            }
        }
    }

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : twistlab::exit_code::config;
    }

    std::string command;
    for (const auto &[name, sub] : subs) {
        if (sub->parsed()) {
            command = name;
        }
    }

    twistlab::RunConfig cfg;
    try {
        twistlab::ConfigTable table = twistlab::command_defaults(command);
        if (!config_path.empty()) {
            table = twistlab::merge_config(table, twistlab::load_config_file(config_path));
        }
        twistlab::ConfigTable flags;
        for (const auto &[section, keys] : twistlab::config_schema()) {
            for (const auto &key : keys) {
                const auto it = options.find(command + "/" + key);
                if (it != options.end() && it->second->count() > 0) {
                    flags[section][key] = values[command + "/" + key];
                }
            }
        }
        if (!seed.empty()) flags["analysis"]["seed"] = seed;
        if (!threads.empty()) flags["analysis"]["threads"] = threads;
        if (!out.empty()) flags["output"]["out"] = out;
        cfg = twistlab::make_run_config(twistlab::merge_config(table, flags));
    }
    catch (const twistlab::Error &e) {
        std::cerr << "twistlab: config error: " << e.what() << "\n";
        return twistlab::exit_code::config;
    }

    const twistlab::CommandOutput result = twistlab::run_command(command, cfg);
    if (!result.diagnostic.empty()) {
        std::cerr << "twistlab " << command << ": " << result.diagnostic << "\n";
    }
    try {
        if (!result.main.empty()) {
            emit(cfg.out, result.main);
        }
        if (!result.csv.empty() && !cfg.csv.empty()) {
            emit(cfg.csv, result.csv);
        }
    }
    catch (const twistlab::Error &e) {
        std::cerr << "twistlab: " << e.what() << "\n";
        return twistlab::exit_code::analysis;
    }
    return result.status;
}
