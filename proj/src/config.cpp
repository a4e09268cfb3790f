#include "mcacq/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <thread>

namespace mcacq {

using json = nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConfigError(std::string("config: unknown key '") + key + "' in " + where);
    }
}

PilotSelection parse_pilot(const json& j) {
    reject_unknown_keys(j, {"kind", "n_id1", "n_id2", "pss_only", "length", "seed"}, "pilot");
    PilotSelection sel;
    if (j.contains("kind")) {
        const std::string kind = j["kind"].get<std::string>();
        if (kind == "nr")
            sel.kind = PilotSelection::Kind::nr;
        else if (kind == "synthetic")
            sel.kind = PilotSelection::Kind::synthetic;
        else
            throw ConfigError("config: pilot kind must be 'nr' or 'synthetic', got '" + kind + "'");
    }
    if (j.contains("n_id1")) sel.n_id1 = j["n_id1"].get<int>();
    if (j.contains("n_id2")) sel.n_id2 = j["n_id2"].get<int>();
    if (j.contains("pss_only")) sel.pss_only = j["pss_only"].get<bool>();
    if (j.contains("length")) sel.length = j["length"].get<size_t>();
    if (j.contains("seed")) sel.seed = j["seed"].get<uint64_t>();
    return sel;
}

}  // namespace

ToolConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    reject_unknown_keys(j,
                        {"sampling_frequency_hz", "fft_size", "subcarrier_spacing_hz",
                         "subcarrier_offset", "doppler_max_hz", "observation_time_s", "d_max_samples",
                         "snr_list_db", "trials", "master_seed", "workers", "enumeration_cap",
                         "design_dopplers_hz", "pilot"},
                        "top level");

    ToolConfig cfg;
    cfg.scenario.workers = std::max(1u, std::thread::hardware_concurrency());
    try {
        auto& sc = cfg.scenario;
        if (j.contains("sampling_frequency_hz"))
            sc.numerology.sampling_frequency_hz = j["sampling_frequency_hz"].get<double>();
        if (j.contains("fft_size")) sc.numerology.fft_size = j["fft_size"].get<int>();
        if (j.contains("subcarrier_spacing_hz"))
            sc.numerology.subcarrier_spacing_hz = j["subcarrier_spacing_hz"].get<double>();
        if (j.contains("subcarrier_offset"))
            sc.numerology.subcarrier_offset = j["subcarrier_offset"].get<int>();
        if (j.contains("doppler_max_hz")) sc.doppler_max_hz = j["doppler_max_hz"].get<double>();
        if (j.contains("observation_time_s"))
            sc.observation_time_s = j["observation_time_s"].get<double>();
        if (j.contains("d_max_samples")) sc.d_max = j["d_max_samples"].get<int>();
        if (j.contains("snr_list_db")) sc.snr_list_db = j["snr_list_db"].get<std::vector<double>>();
        if (j.contains("trials")) sc.trials = j["trials"].get<int>();
        if (j.contains("master_seed")) sc.master_seed = j["master_seed"].get<uint64_t>();
        if (j.contains("workers")) sc.workers = j["workers"].get<int>();
        if (j.contains("enumeration_cap")) cfg.enumeration_cap = j["enumeration_cap"].get<uint64_t>();
        if (j.contains("design_dopplers_hz"))
            cfg.design_dopplers_hz = j["design_dopplers_hz"].get<std::vector<double>>();
        if (j.contains("pilot")) sc.pilot = parse_pilot(j["pilot"]);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.scenario.validate();
    return cfg;
}

ToolConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_config_text(text);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string describe_config(const ToolConfig& cfg) {
    const auto& sc = cfg.scenario;
    json j;
    j["sampling_frequency_hz"] = sc.numerology.sampling_frequency_hz;
    j["fft_size"] = sc.numerology.fft_size;
    j["subcarrier_spacing_hz"] = sc.numerology.subcarrier_spacing_hz;
    j["subcarrier_offset"] = sc.numerology.subcarrier_offset;
    j["doppler_max_hz"] = sc.doppler_max_hz;
    j["observation_time_s"] = sc.observation_time_s;
    j["d_max_samples"] = sc.d_max;
    j["snr_list_db"] = sc.snr_list_db;
    j["trials"] = sc.trials;
    j["master_seed"] = sc.master_seed;
    j["workers"] = sc.workers;
    j["enumeration_cap"] = cfg.enumeration_cap;
    if (cfg.design_dopplers_hz) j["design_dopplers_hz"] = *cfg.design_dopplers_hz;
    json pilot;
    pilot["kind"] = sc.pilot.kind == PilotSelection::Kind::nr ? "nr" : "synthetic";
    pilot["n_id1"] = sc.pilot.n_id1;
    pilot["n_id2"] = sc.pilot.n_id2;
    pilot["pss_only"] = sc.pilot.pss_only;
    pilot["length"] = sc.pilot.length;
    pilot["seed"] = sc.pilot.seed;
    j["pilot"] = pilot;
    json patterns = json::array();
    for (const auto& p : sc.patterns) patterns.push_back(p.label());
    j["patterns"] = patterns;
    return j.dump();
}

}  // namespace mcacq
