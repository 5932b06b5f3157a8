// dmtsim — DMT over IM/DD fiber link simulator.
//
// Subcommands:
//   probe   estimate the SNR profile and emit the bit/power loading tables
//   sweep   full OSNR sweep: probe + load once, then Monte-Carlo BER per point
//   fading  tabulate the analytic dispersion power-fading magnitude
//   point   single OSNR point (or noise-off) with probe + load
//
// Flag precedence: command line > --config file > built-in defaults.

#include "dmt/errors.hpp"
#include "dmt/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace {

struct CliOverrides {
    std::string config_path;
    double rate_gbps = 0;
    double length_km = 0;
    std::string osnr;
    int frames = 0;
    uint64_t seed = 0;
    std::string out_dir;
};

std::vector<std::optional<double>> parse_osnr_list(const std::string& s) {
    std::vector<std::optional<double>> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        const std::string tok = s.substr(pos, comma - pos);
        if (tok == "off")
            out.push_back(std::nullopt);
        else
            out.push_back(std::stod(tok));
        pos = comma + 1;
    }
    return out;
}

void add_common_flags(CLI::App* cmd, CliOverrides& ov) {
    cmd->add_option("--config", ov.config_path, "JSON config file");
    cmd->add_option("--rate-gbps", ov.rate_gbps, "target gross rate in Gb/s");
    cmd->add_option("--length-km", ov.length_km, "fiber length in km");
    cmd->add_option("--osnr", ov.osnr, "OSNR list in dB (comma separated) or 'off'");
    cmd->add_option("--frames", ov.frames, "Monte-Carlo frames per point");
    cmd->add_option("--seed", ov.seed, "master seed");
    cmd->add_option("--out", ov.out_dir, "output directory");
}

dmt::ExperimentConfig resolve_config(const CLI::App* cmd, const CliOverrides& ov) {
    dmt::ExperimentConfig cfg;
    if (cmd->count("--config")) cfg = dmt::load_config(ov.config_path, cfg);
    if (cmd->count("--rate-gbps")) cfg.rate_gbps = ov.rate_gbps;
    if (cmd->count("--length-km")) cfg.link.fiber_len = ov.length_km * 1e3;
    if (cmd->count("--osnr")) cfg.osnr_points = parse_osnr_list(ov.osnr);
    if (cmd->count("--frames")) cfg.n_frames = ov.frames;
    if (cmd->count("--seed")) cfg.seed = ov.seed;
    if (cmd->count("--out")) cfg.output_path = ov.out_dir;
    cfg.validate();
    return cfg;
}

std::string point_str(const dmt::BerPoint& p) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "osnr=%s ber=%.6e errors=%lld bits=%lld hd=%d sd=%d%s",
                  p.osnr_db ? std::to_string(*p.osnr_db).c_str() : "off", p.ber, p.errors, p.bits,
                  p.hd_pass ? 1 : 0, p.sd_pass ? 1 : 0, p.reliable ? "" : " [unreliable-sync]");
    return buf;
}

int cmd_probe(const dmt::ExperimentConfig& cfg) {
    const auto res = dmt::probe_and_load(cfg);
    std::filesystem::create_directories(cfg.output_path);
    const auto dir = std::filesystem::path(cfg.output_path);
    const auto fp = dmt::config_fingerprint(cfg);
    dmt::write_loading_csv((dir / "loading.csv").string(), res.table, fp);
    dmt::write_snr_csv((dir / "snr.csv").string(), res.profile, cfg, fp);
    std::printf("loading: B=%lld loaded=%d max_bits=%d -> %s/loading.csv, snr.csv\n",
                res.table.target_bits, res.table.n_loaded(), res.table.max_bits(),
                cfg.output_path.c_str());
    return 0;
}

int cmd_sweep(const dmt::ExperimentConfig& cfg) {
    const auto report = dmt::osnr_sweep(cfg);
    for (const auto& p : report.points) std::printf("%s\n", point_str(p).c_str());
    std::printf("wrote %s/{sweep,loading,snr}.{csv,dat}\n", cfg.output_path.c_str());
    return 0;
}

int cmd_fading(const dmt::ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.output_path);
    const auto path = (std::filesystem::path(cfg.output_path) / "fading.csv").string();
    dmt::write_fading_csv(path, cfg, dmt::config_fingerprint(cfg));
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_point(const dmt::ExperimentConfig& cfg) {
    std::optional<double> osnr;
    if (!cfg.osnr_points.empty()) osnr = cfg.osnr_points.front();
    const auto probe = dmt::probe_and_load(cfg);
    const auto pt = dmt::run_point(cfg, probe.table, osnr, 0);
    std::printf("%s\n", point_str(pt).c_str());
    return pt.hd_pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DMT IM/DD optical link simulator"};
    app.require_subcommand(1);
    CliOverrides ov;

    auto* probe = app.add_subcommand("probe", "SNR profile + loading table");
    auto* sweep = app.add_subcommand("sweep", "OSNR sweep with Monte-Carlo BER");
    auto* fading = app.add_subcommand("fading", "analytic dispersion fading table");
    auto* point = app.add_subcommand("point", "single OSNR point");
    for (auto* cmd : {probe, sweep, fading, point}) add_common_flags(cmd, ov);

    CLI11_PARSE(app, argc, argv);

    try {
        const CLI::App* active = app.get_subcommands().front();
        const auto cfg = resolve_config(active, ov);
        if (active == probe) return cmd_probe(cfg);
        if (active == sweep) return cmd_sweep(cfg);
        if (active == fading) return cmd_fading(cfg);
        return cmd_point(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
