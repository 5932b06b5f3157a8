// Python bindings for the DMT link simulator: configuration objects, the
// QAM mapper, Levin-Campello loading, the fading oracle, and the probe /
// BER-point / sweep drivers. Containers cross the boundary by value, so
// mutate configs by assignment (cfg.osnr_points = [...]), not in place.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dmt/channel.hpp"
#include "dmt/config.hpp"
#include "dmt/errors.hpp"
#include "dmt/harness.hpp"
#include "dmt/loading.hpp"
#include "dmt/qam.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace py = pybind11;
using namespace dmt;

namespace {

std::vector<std::complex<double>> constellation_points(int m) {
    return build_constellation(m).points;
}

std::complex<double> map_bits_vec(const std::vector<uint8_t>& bits) {
    if (bits.empty() || bits.size() > 7)
        throw config_error("map_bits: need 1..7 bits, got " + std::to_string(bits.size()));
    return map_bits(bits.data(), static_cast<int>(bits.size()));
}

std::vector<uint8_t> demap_bits_vec(std::complex<double> p, int m) {
    std::vector<uint8_t> out(static_cast<size_t>(m));
    demap_hard(p, m, out.data());
    return out;
}

} // namespace

PYBIND11_MODULE(dmtlink, m) {
    m.doc() = "Discrete-multitone IM/DD optical link simulator";

    // ---- errors ---------------------------------------------------------
    py::register_exception<config_error>(m, "ConfigError");
    py::register_exception<framing_error>(m, "FramingError");
    py::register_exception<sync_error>(m, "SyncError");
    py::register_exception<degenerate_signal_error>(m, "DegenerateSignalError");
    static py::exception<infeasible_rate_error> exc_rate(m, "InfeasibleRateError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const infeasible_rate_error& e) {
            // args = (message, max_achievable_bits)
            const py::tuple args = py::make_tuple(e.what(), e.max_achievable);
            PyErr_SetObject(exc_rate.ptr(), args.ptr());
        }
    });

    // ---- configuration ----------------------------------------------------
    py::class_<DmtConfig>(m, "DmtConfig")
        .def(py::init<>())
        .def_readwrite("fft_size", &DmtConfig::fft_size)
        .def_readwrite("cp_len", &DmtConfig::cp_len)
        .def_readwrite("n_usable", &DmtConfig::n_usable)
        .def_readwrite("n_modulated", &DmtConfig::n_modulated)
        .def_readwrite("dac_rate", &DmtConfig::dac_rate)
        .def_readwrite("adc_rate", &DmtConfig::adc_rate)
        .def_readwrite("clip_ratio_db", &DmtConfig::clip_ratio_db)
        .def_readwrite("frame_len", &DmtConfig::frame_len)
        .def_readwrite("n_ts", &DmtConfig::n_ts)
        .def_readwrite("dd_alpha", &DmtConfig::dd_alpha)
        .def_readwrite("sc_plateau", &DmtConfig::sc_plateau)
        .def_readwrite("sc_threshold", &DmtConfig::sc_threshold)
        .def("symbol_len", &DmtConfig::symbol_len)
        .def("n_payload", &DmtConfig::n_payload)
        .def("validate", &DmtConfig::validate);

    py::class_<LinkConfig>(m, "LinkConfig")
        .def(py::init<>())
        .def_readwrite("carrier_freq", &LinkConfig::carrier_freq)
        .def_readwrite("fiber_len", &LinkConfig::fiber_len)
        .def_readwrite("dispersion", &LinkConfig::dispersion)
        .def_readwrite("loss_db_per_m", &LinkConfig::loss_db_per_m)
        .def_readwrite("launch_power_dbm", &LinkConfig::launch_power_dbm)
        .def_readwrite("osnr_db", &LinkConfig::osnr_db)
        .def_readwrite("pd_bandwidth", &LinkConfig::pd_bandwidth)
        .def_readwrite("demux_bandwidth", &LinkConfig::demux_bandwidth)
        .def_readwrite("mod_index", &LinkConfig::mod_index)
        .def_readwrite("noise_seed", &LinkConfig::noise_seed)
        .def("wavelength", &LinkConfig::wavelength)
        .def("validate", &LinkConfig::validate);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("dmt", &ExperimentConfig::dmt)
        .def_readwrite("link", &ExperimentConfig::link)
        .def_readwrite("rate_gbps", &ExperimentConfig::rate_gbps)
        .def_readwrite("osnr_points", &ExperimentConfig::osnr_points)
        .def_readwrite("n_frames", &ExperimentConfig::n_frames)
        .def_readwrite("n_probe_frames", &ExperimentConfig::n_probe_frames)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("output_path", &ExperimentConfig::output_path)
        .def("validate", &ExperimentConfig::validate);

    m.def("load_config", &load_config, py::arg("path"), py::arg("base") = ExperimentConfig{},
          "read a JSON config file over the given base configuration");
    m.def("config_from_json", &config_from_json, py::arg("text"),
          py::arg("base") = ExperimentConfig{});
    m.def("config_to_json", &config_to_json, py::arg("cfg"));
    m.def("config_fingerprint", &config_fingerprint, py::arg("cfg"),
          "canonical 16-hex-digit digest of everything but the output path");

    // ---- QAM ---------------------------------------------------------------
    m.def("constellation", &constellation_points, py::arg("m"),
          "unit-energy Gray-labeled points for m in 1..7, indexed by label");
    m.def("map_bits", &map_bits_vec, py::arg("bits"), "MSB-first bits -> constellation point");
    m.def("demap_bits", &demap_bits_vec, py::arg("point"), py::arg("m"),
          "nearest point -> MSB-first bits");
    m.def("demap_label", &demap_label, py::arg("point"), py::arg("m"));

    // ---- loading -------------------------------------------------------------
    py::class_<SnrProfile>(m, "SnrProfile")
        .def(py::init<>())
        .def_readwrite("snr", &SnrProfile::snr);

    py::class_<LoadingTable>(m, "LoadingTable")
        .def(py::init<>())
        .def_readwrite("bits", &LoadingTable::bits)
        .def_readwrite("power", &LoadingTable::power)
        .def_readwrite("target_bits", &LoadingTable::target_bits)
        .def_readwrite("gap_db", &LoadingTable::gap_db)
        .def("sum_bits", &LoadingTable::sum_bits)
        .def("n_loaded", &LoadingTable::n_loaded)
        .def("max_bits", &LoadingTable::max_bits);

    m.def("gap_from_ber", &gap_from_ber, py::arg("target_ber"), py::arg("m_reference") = 4,
          "SNR gap (dB) for the loading energy model");
    m.def("db_to_linear", &db_to_linear);
    m.def("linear_to_db", &linear_to_db);
    m.def("incremental_energy", &incremental_energy, py::arg("b"), py::arg("snr"),
          py::arg("gap_linear"));
    m.def("uniform_loading", &uniform_loading, py::arg("n_carriers"), py::arg("bits_per_carrier"));
    m.def("bit_load", &bit_load, py::arg("profile"), py::arg("target_bits"), py::arg("gap_db"),
          py::arg("b_max") = 7, "greedy Levin-Campello allocation");
    m.def("power_load", &power_load, py::arg("table"), py::arg("profile"),
          "margin-equalizing powers over the fixed bit map (mutates table)");
    m.def("estimate_snr_profile", &estimate_snr_profile, py::arg("equalized"), py::arg("known"),
          "data-aided EVM estimate; rows = symbols, cols = carriers");

    // ---- link physics -------------------------------------------------------
    m.def("analytic_fading", &analytic_fading, py::arg("f_hz"), py::arg("cfg"),
          "dispersion power-fading magnitude |cos(pi lambda^2 D L f^2 / c)|");
    m.def("carrier_freq_hz", &carrier_freq_hz, py::arg("k"), py::arg("cfg"),
          "center frequency of 1-based carrier k");
    m.def("target_bits_per_symbol", &target_bits_per_symbol, py::arg("cfg"));

    // ---- harness -----------------------------------------------------------
    py::class_<BerPoint>(m, "BerPoint")
        .def_readonly("osnr_db", &BerPoint::osnr_db)
        .def_readonly("errors", &BerPoint::errors)
        .def_readonly("bits", &BerPoint::bits)
        .def_readonly("ber", &BerPoint::ber)
        .def_readonly("hd_pass", &BerPoint::hd_pass)
        .def_readonly("sd_pass", &BerPoint::sd_pass)
        .def_readonly("reliable", &BerPoint::reliable)
        .def_readonly("low_confidence", &BerPoint::low_confidence);

    py::class_<ProbeResult>(m, "ProbeResult")
        .def_readonly("table", &ProbeResult::table)
        .def_readonly("profile", &ProbeResult::profile);

    py::class_<BerReport>(m, "BerReport")
        .def_readonly("points", &BerReport::points)
        .def_readonly("loading", &BerReport::loading)
        .def_readonly("profile", &BerReport::profile)
        .def_readonly("fingerprint", &BerReport::fingerprint);

    m.def("probe_and_load", &probe_and_load, py::arg("cfg"),
          py::call_guard<py::gil_scoped_release>(),
          "probe the link with 16-QAM training frames and build the loading table");
    m.def("run_point", &run_point, py::arg("cfg"), py::arg("loading"), py::arg("osnr_db"),
          py::arg("point_index") = 0, py::call_guard<py::gil_scoped_release>(),
          "Monte-Carlo BER at one OSNR point (None = noise off)");
    m.def("osnr_sweep", &osnr_sweep, py::arg("cfg"), py::call_guard<py::gil_scoped_release>(),
          "probe, sweep every OSNR point, and render CSV/dat tables");

    m.attr("HD_FEC_BER") = kHdFecBer;
    m.attr("SD_FEC_BER") = kSdFecBer;
}
