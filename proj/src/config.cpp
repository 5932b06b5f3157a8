#include "dmt/config.hpp"

#include "dmt/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>

namespace dmt {

namespace {
constexpr double kSpeedOfLight = 299792458.0;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }
} // namespace

void DmtConfig::validate() const {
    if (!is_pow2(fft_size)) throw config_error("fft_size must be a power of two");
    if (cp_len <= 0 || cp_len >= fft_size) throw config_error("cp_len out of range");
    if (n_usable > fft_size / 2 - 1) throw config_error("n_usable exceeds fft_size/2 - 1");
    if (n_modulated <= 0 || n_modulated > n_usable)
        throw config_error("n_modulated must be in 1..n_usable");
    if (frame_len <= n_ts || n_ts < 2)
        throw config_error("frame_len must exceed n_ts and n_ts >= 2");
    if (dac_rate <= 0 || adc_rate <= 0) throw config_error("sample rates must be positive");
    if (!(dd_alpha >= 0.0 && dd_alpha <= 1.0)) throw config_error("dd_alpha must be in [0,1]");
}

double LinkConfig::wavelength() const { return kSpeedOfLight / carrier_freq; }

void LinkConfig::validate() const {
    if (fiber_len < 0) throw config_error("fiber_len must be >= 0");
    if (!(dispersion == dispersion)) throw config_error("dispersion must be finite");
    if (pd_bandwidth <= 0) throw config_error("pd_bandwidth must be positive");
    if (!(mod_index > 0.0 && mod_index <= 0.5))
        throw config_error("mod_index must be in (0, 0.5]");
    if (carrier_freq <= 0) throw config_error("carrier_freq must be positive");
    if (osnr_db && !(*osnr_db > -100.0 && *osnr_db < 100.0))
        throw config_error("osnr_db out of sane range");
}

void ExperimentConfig::validate() const {
    dmt.validate();
    link.validate();
    if (n_frames < 1) throw config_error("n_frames must be >= 1");
    if (n_probe_frames < 1) throw config_error("n_probe_frames must be >= 1");
    if (rate_gbps <= 0) throw config_error("rate_gbps must be positive");
}

namespace {

using nlohmann::json;

json osnr_to_json(const std::optional<double>& v) {
    if (v) return json(*v);
    return json("off");
}

std::optional<double> osnr_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "off") return std::nullopt;
        throw config_error("osnr entries must be numbers or \"off\"");
    }
    return j.get<double>();
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

json dmt_to_json(const DmtConfig& c) {
    return json{{"fft_size", c.fft_size},       {"cp_len", c.cp_len},
                {"n_usable", c.n_usable},       {"n_modulated", c.n_modulated},
                {"dac_rate", c.dac_rate},       {"adc_rate", c.adc_rate},
                {"clip_ratio_db", c.clip_ratio_db}, {"frame_len", c.frame_len},
                {"n_ts", c.n_ts},               {"dd_alpha", c.dd_alpha},
                {"sc_plateau", c.sc_plateau},   {"sc_threshold", c.sc_threshold}};
}

void dmt_from_json(const json& j, DmtConfig& c) {
    get_if(j, "fft_size", c.fft_size);
    get_if(j, "cp_len", c.cp_len);
    get_if(j, "n_usable", c.n_usable);
    get_if(j, "n_modulated", c.n_modulated);
    get_if(j, "dac_rate", c.dac_rate);
    get_if(j, "adc_rate", c.adc_rate);
    get_if(j, "clip_ratio_db", c.clip_ratio_db);
    get_if(j, "frame_len", c.frame_len);
    get_if(j, "n_ts", c.n_ts);
    get_if(j, "dd_alpha", c.dd_alpha);
    get_if(j, "sc_plateau", c.sc_plateau);
    get_if(j, "sc_threshold", c.sc_threshold);
}

json link_to_json(const LinkConfig& c) {
    return json{{"carrier_freq", c.carrier_freq},
                {"fiber_len", c.fiber_len},
                {"dispersion", c.dispersion},
                {"loss_db_per_m", c.loss_db_per_m},
                {"launch_power_dbm", c.launch_power_dbm},
                {"osnr_db", osnr_to_json(c.osnr_db)},
                {"pd_bandwidth", c.pd_bandwidth},
                {"demux_bandwidth", c.demux_bandwidth},
                {"mod_index", c.mod_index},
                {"noise_seed", c.noise_seed}};
}

void link_from_json(const json& j, LinkConfig& c) {
    get_if(j, "carrier_freq", c.carrier_freq);
    get_if(j, "fiber_len", c.fiber_len);
    get_if(j, "dispersion", c.dispersion);
    get_if(j, "loss_db_per_m", c.loss_db_per_m);
    get_if(j, "launch_power_dbm", c.launch_power_dbm);
    if (j.contains("osnr_db")) c.osnr_db = osnr_from_json(j.at("osnr_db"));
    get_if(j, "pd_bandwidth", c.pd_bandwidth);
    get_if(j, "demux_bandwidth", c.demux_bandwidth);
    get_if(j, "mod_index", c.mod_index);
    get_if(j, "noise_seed", c.noise_seed);
}

json experiment_to_json(const ExperimentConfig& c) {
    json pts = json::array();
    for (const auto& p : c.osnr_points) pts.push_back(osnr_to_json(p));
    return json{{"dmt", dmt_to_json(c.dmt)},
                {"link", link_to_json(c.link)},
                {"rate_gbps", c.rate_gbps},
                {"osnr_points", pts},
                {"n_frames", c.n_frames},
                {"n_probe_frames", c.n_probe_frames},
                {"seed", c.seed},
                {"output_path", c.output_path}};
}

void experiment_from_json(const json& j, ExperimentConfig& c) {
    if (j.contains("dmt")) dmt_from_json(j.at("dmt"), c.dmt);
    if (j.contains("link")) link_from_json(j.at("link"), c.link);
    get_if(j, "rate_gbps", c.rate_gbps);
    if (j.contains("osnr_points")) {
        c.osnr_points.clear();
        for (const auto& p : j.at("osnr_points")) c.osnr_points.push_back(osnr_from_json(p));
    }
    get_if(j, "n_frames", c.n_frames);
    get_if(j, "n_probe_frames", c.n_probe_frames);
    get_if(j, "seed", c.seed);
    get_if(j, "output_path", c.output_path);
}

} // namespace

ExperimentConfig config_from_json(const std::string& text, ExperimentConfig base) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw config_error(std::string("config parse failure: ") + e.what());
    }
    experiment_from_json(j, base);
    return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json(text, base);
}

std::string config_to_json(const ExperimentConfig& cfg) {
    return experiment_to_json(cfg).dump(2);
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
    // canonical dump: nlohmann objects are key-sorted, so this is stable.
    // The destination directory does not identify the experiment.
    json j = experiment_to_json(cfg);
    j.erase("output_path");
    const std::string s = j.dump();
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace dmt
