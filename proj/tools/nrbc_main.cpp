#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "nrbc/nrbc.h"

namespace {

const char* describe(const std::string& id) {
    static const std::map<std::string, const char*> text = {
        {"table1", "sample sigma_n(t) and compare with the published values"},
        {"zeros", "dump the complex zeros of K_n and K_{n+1/2} as CSV"},
        {"wn-profile", "tabulate the branch-cut density W_n(r) and its large-order form"},
        {"nrbc-accuracy", "boundary-condition residuals of the exact exterior solution"},
        {"time-convergence", "solver error and observed order under time-step refinement"},
        {"space-convergence", "solver error under polynomial-degree refinement"},
        {"simulate", "exact and numerical fields on the annulus and the boundary trace"},
        {"conv-bench", "recursive against direct convolution: deviation and timing"},
    };
    auto it = text.find(id);
    return it == text.end() ? "" : it->second;
}

int report_error(const char* what, nrbc_status s) {
    std::fprintf(stderr, "nrbc: %s: %s: %s\n", what, nrbc_status_string(s), nrbc_last_error());
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonreflecting boundary kernels, recursive convolution and a modal wave solver"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(nrbc_version()));

    std::string config_path, out_dir, threads, gate_scale;
    app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads (capped by NRBC_MAX_THREADS)");
    app.add_option("--gate-scale", gate_scale, "relax every gate tolerance by this factor");

    std::vector<std::string> keys;
    for (size_t i = 0; i < nrbc_config_key_count(); ++i) {
        std::string k = nrbc_config_key(i);
        if (k != "experiment" && k != "out" && k != "threads" && k != "gate-scale") keys.push_back(k);
    }

    std::map<std::string, std::map<std::string, std::string>> overrides;
    std::vector<CLI::App*> subs;
    for (size_t i = 0; i < nrbc_experiment_count(); ++i) {
        std::string id = nrbc_experiment_id(i);
        CLI::App* sub = app.add_subcommand(id, describe(id));
        sub->fallthrough();
        for (const auto& k : keys) sub->add_option("--" + k, overrides[id][k], "configuration key " + k);
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    CLI::App* chosen = nullptr;
    for (CLI::App* s : subs)
        if (s->parsed()) chosen = s;
    const std::string id = chosen->get_name();

    nrbc_config* cfg = nullptr;
    if (nrbc_status s = nrbc_config_create(id.c_str(), &cfg); s != NRBC_OK) return report_error("config", s);
    auto set = [&](const std::string& k, const std::string& v) {
        nrbc_status s = nrbc_config_set(cfg, k.c_str(), v.c_str());
        return s == NRBC_OK ? 0 : report_error(("--" + k).c_str(), s);
    };
    int rc = 0;
    if (!config_path.empty()) {
        if (nrbc_status s = nrbc_config_load_file(cfg, config_path.c_str()); s != NRBC_OK)
            rc = report_error(config_path.c_str(), s);
        if (!rc) rc = set("experiment", id);
    }
    for (const auto& k : keys)
        if (!rc && chosen->count("--" + k) > 0) rc = set(k, overrides[id][k]);
    if (!rc && !out_dir.empty()) rc = set("out", out_dir);
    if (!rc && !threads.empty()) rc = set("threads", threads);
    if (!rc && !gate_scale.empty()) rc = set("gate-scale", gate_scale);
    if (rc) {
        nrbc_config_free(cfg);
        return rc;
    }

    nrbc_report* rep = nullptr;
    nrbc_status s = nrbc_run_experiment(cfg, &rep);
    nrbc_config_free(cfg);
    if (s != NRBC_OK) return report_error(id.c_str(), s);

    for (size_t i = 0; i < nrbc_report_gate_count(rep); ++i) {
        const char *name, *rel;
        double value, limit;
        int pass;
        nrbc_report_gate(rep, i, &name, &value, &rel, &limit, &pass);
        std::printf("%s  %-32s %.6e %s %.6e\n", pass ? "PASS" : "FAIL", name, value, rel, limit);
    }
    for (size_t i = 0; i < nrbc_report_metric_count(rep); ++i) {
        const char *k, *v;
        nrbc_report_metric(rep, i, &k, &v);
        std::printf("      %-32s %s\n", k, v);
    }
    for (size_t i = 0; i < nrbc_report_file_count(rep); ++i) std::printf("wrote %s\n", nrbc_report_file(rep, i));
    bool ok = nrbc_report_passed(rep) != 0;
    std::printf("%s: %s (%.2f s)\n", id.c_str(), ok ? "PASS" : "FAIL", nrbc_report_seconds(rep));
    nrbc_report_free(rep);
    return ok ? 0 : 1;
}
