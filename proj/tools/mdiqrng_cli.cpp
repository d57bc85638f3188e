// Copyright 2026 The mdiqrng Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command line front end. Everything goes through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "mdiqrng/mdiqrng.h"

namespace {

struct Flags {
    std::string config_path;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option *> options;
    std::string bits_path;
};

void add_config_flags(CLI::App *cmd, Flags &flags) {
    cmd->add_option("-c,--config", flags.config_path, "INI configuration file");
    for (size_t i = 0; i < mdq_config_key_count(); i++) {
        std::string name = mdq_config_key_name(i);
        std::string help = mdq_config_key_help(i);
        std::string def = mdq_config_key_default(i);
        if (!def.empty()) help += " (default " + def + ")";
        flags.options[name] = cmd->add_option("--" + name, flags.values[name], help);
    }
}

int fail_with(int status, const std::string &context) {
    std::fprintf(stderr, "mdiqrng: %s: %s (%s)\n", context.c_str(), mdq_last_error(), mdq_status_name(status));
    return status;
}

int run(const std::string &command, const Flags &flags) {
    mdq_config *config = nullptr;
    int status = mdq_config_new(&config);
    if (status != MDQ_OK) return fail_with(status, "config");
    struct Guard {
        mdq_config *c;
        ~Guard() {
            mdq_config_free(c);
        }
    } guard{config};

    if (!flags.config_path.empty()) {
        status = mdq_config_load(config, flags.config_path.c_str());
        if (status != MDQ_OK) return fail_with(status, flags.config_path);
    }
    for (const auto &[name, option] : flags.options) {
        if (option->count() == 0) continue;
        status = mdq_config_set(config, name.c_str(), flags.values.at(name).c_str());
        if (status != MDQ_OK) return fail_with(status, "--" + name);
    }

    mdq_report *report = nullptr;
    status = mdq_run(config, command.c_str(), flags.bits_path.empty() ? nullptr : flags.bits_path.c_str(), &report);
    if (!report) return fail_with(status, command);
    std::string error_message = mdq_last_error();

    char path[4096];
    size_t needed = 0;
    std::string report_path;
    if (mdq_config_get(config, "paths.report", path, sizeof path, &needed) == MDQ_OK) report_path = path;
    if (report_path.empty()) {
        std::fputs(mdq_report_json(report), stdout);
    } else {
        std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
        out << mdq_report_json(report);
        if (!out) {
            mdq_report_free(report);
            std::fprintf(stderr, "mdiqrng: cannot write report to %s\n", report_path.c_str());
            return MDQ_IO;
        }
    }
    mdq_report_free(report);
    if (status != MDQ_OK) {
        std::fprintf(stderr, "mdiqrng: %s: %s (%s)\n", command.c_str(), error_message.c_str(), mdq_status_name(status));
    }
    return status;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Source-trusted measurement-device-independent QRNG post-processing"};
    app.require_subcommand(0, 1);
    bool list_keys = false;
    bool version = false;
    app.add_flag("--list-keys", list_keys, "print every configuration key with its default");
    app.add_flag("--version", version, "print the library version");

    const char *commands[][2] = {
        {"simulate", "simulate trials and write the record file"},
        {"certify", "certify a record file or injected tally and write the certificate"},
        {"extract", "hash the generation bits with the certified output length"},
        {"test", "run the statistical battery on a bit file"},
        {"pipeline", "simulate, certify, extract and test in one run"},
    };
    std::map<std::string, Flags> flags;
    std::map<std::string, CLI::App *> subs;
    for (const auto &c : commands) {
        auto *sub = app.add_subcommand(c[0], c[1]);
        add_config_flags(sub, flags[c[0]]);
        subs[c[0]] = sub;
    }
    subs["test"]->add_option("bits", flags["test"].bits_path, "bit file (default paths.output)");

    CLI11_PARSE(app, argc, argv);

    if (version) {
        std::printf("%s\n", mdq_version());
        return 0;
    }
    if (list_keys) {
        for (size_t i = 0; i < mdq_config_key_count(); i++) {
            std::printf("%-28s %-12s %s\n", mdq_config_key_name(i), mdq_config_key_default(i), mdq_config_key_help(i));
        }
        return 0;
    }
    for (const auto &[name, sub] : subs) {
        if (sub->parsed()) return run(name, flags[name]);
    }
    std::fputs(app.help().c_str(), stdout);
    return MDQ_INVALID_ARGUMENT;
}
