#include "isp/config.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace isp {

namespace {

using nlohmann::json;

constexpr double kDeg = M_PI / 180.0;

double get_num(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j.at(key).is_number()) {
        throw ConfigError("config: key '" + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

InertiaTensor parse_inertia(const json& j, BodyTag tag, const std::string& section) {
    try {
        return InertiaTensor::principal(j.at("xx").get<double>(), j.at("yy").get<double>(),
                                        j.at("zz").get<double>(), tag);
    } catch (const std::exception& e) {
        throw ConfigError("config: section '" + section + "': " + e.what());
    }
}

json inertia_to_json(const InertiaTensor& i) {
    return json{{"xx", i.xx}, {"yy", i.yy}, {"zz", i.zz}};
}

FrictionModel parse_friction(const json& j, double smoothing) {
    FrictionModel f;
    f.viscous = get_num(j, "viscous", 0.0);
    f.coulomb = get_num(j, "coulomb", 0.0);
    f.smoothing_rate = smoothing;
    if (f.viscous < 0.0 || f.coulomb < 0.0) {
        throw ConfigError("config: friction coefficients must be non-negative");
    }
    return f;
}

MotorParams parse_motor(const json& j) {
    MotorParams m;
    m.torque_constant = get_num(j, "torque_constant", m.torque_constant);
    m.back_emf_constant = get_num(j, "back_emf_constant", m.back_emf_constant);
    m.winding_resistance = get_num(j, "winding_resistance", m.winding_resistance);
    m.supply_limit = get_num(j, "supply_limit_v", m.supply_limit);
    return m;
}

json motor_to_json(const MotorParams& m) {
    return json{{"torque_constant", m.torque_constant},
                {"back_emf_constant", m.back_emf_constant},
                {"winding_resistance", m.winding_resistance},
                {"supply_limit_v", m.supply_limit}};
}

ControllerForm parse_form(const std::string& text) {
    if (text == "P") {
        return ControllerForm::P;
    }
    if (text == "PI") {
        return ControllerForm::PI;
    }
    throw ConfigError("config: controller form must be 'P' or 'PI', got '" + text + "'");
}

ChannelConfig parse_channel(const json& j, const std::string& name) {
    ChannelConfig c;
    try {
        c.loop.form = parse_form(j.at("form").get<std::string>());
        c.loop.crossover_hz = j.at("crossover_hz").get<double>();
        c.loop.max_resonance_db = get_num(j, "max_resonance_db", 3.0);
        c.loop.compensator_pole_hz = get_num(j, "compensator_pole_hz", 0.0);
        c.saturation = get_num(j, "saturation", 0.0);
        c.anti_windup = j.value("anti_windup", true);
        if (j.contains("designed")) {
            const json& d = j.at("designed");
            c.kp = d.at("kp").get<double>();
            c.ki = get_num(d, "ki", 0.0);
            c.sample_period = d.at("sample_period_s").get<double>();
            c.b = d.at("b").get<std::vector<double>>();
            c.a_tail = d.at("a").get<std::vector<double>>();
        }
    } catch (const json::exception& e) {
        throw ConfigError("config: controller '" + name + "': " + e.what());
    }
    return c;
}

json channel_to_json(const ChannelConfig& c) {
    json j{{"form", c.loop.form == ControllerForm::PI ? "PI" : "P"},
           {"crossover_hz", c.loop.crossover_hz},
           {"max_resonance_db", c.loop.max_resonance_db},
           {"compensator_pole_hz", c.loop.compensator_pole_hz},
           {"saturation", c.saturation},
           {"anti_windup", c.anti_windup}};
    if (c.designed()) {
        j["designed"] = json{{"kp", c.kp},
                             {"ki", c.ki},
                             {"sample_period_s", c.sample_period},
                             {"b", c.b},
                             {"a", c.a_tail}};
    }
    return j;
}

int parse_axis(const json& j) {
    const std::string axis = j.at("axis").get<std::string>();
    if (axis == "x") {
        return 0;
    }
    if (axis == "y") {
        return 1;
    }
    if (axis == "z") {
        return 2;
    }
    throw ConfigError("config: base-motion axis must be 'x', 'y' or 'z'");
}

BaseMotionProfile parse_base_motion(const json& j, const std::string& base_dir) {
    BaseMotionProfile p;
    const std::string kind = j.value("kind", "none");
    if (kind == "none") {
        p.kind = BaseMotionProfile::Kind::None;
        return p;
    }
    if (kind == "sine" || kind == "multisine") {
        p.kind = kind == "sine" ? BaseMotionProfile::Kind::Sine : BaseMotionProfile::Kind::MultiSine;
        for (const json& cj : j.at("components")) {
            SineComponent c;
            c.axis = parse_axis(cj);
            const bool has_rad = cj.contains("amplitude_rad_s");
            const bool has_deg = cj.contains("amplitude_deg_s");
            if (has_rad == has_deg) {
                throw ConfigError("config: sine component needs exactly one of "
                                  "amplitude_rad_s / amplitude_deg_s");
            }
            c.amplitude = has_rad ? cj.at("amplitude_rad_s").get<double>()
                                  : cj.at("amplitude_deg_s").get<double>() * kDeg;
            c.frequency_hz = cj.at("frequency_hz").get<double>();
            c.phase_rad = get_num(cj, "phase_rad", 0.0);
            p.components.push_back(c);
        }
        return p;
    }
    if (kind == "recorded") {
        p.kind = BaseMotionProfile::Kind::Recorded;
        const std::string csv = j.at("csv").get<std::string>();
        const std::filesystem::path path = std::filesystem::path(base_dir) / csv;
        load_recorded_motion(path.string(), p);
        return p;
    }
    if (kind == "recorded_inline") {
        p.kind = BaseMotionProfile::Kind::Recorded;
        p.recorded_t = j.at("t").get<std::vector<double>>();
        for (const json& row : j.at("rates")) {
            const auto v = row.get<std::vector<double>>();
            if (v.size() != 3) {
                throw ConfigError("config: recorded_inline rates need three components");
            }
            p.recorded_rate.emplace_back(v[0], v[1], v[2]);
        }
        return p;
    }
    throw ConfigError("config: base-motion kind '" + kind + "' unknown");
}

json base_motion_to_json(const BaseMotionProfile& p) {
    json j;
    switch (p.kind) {
    case BaseMotionProfile::Kind::None:
        j["kind"] = "none";
        break;
    case BaseMotionProfile::Kind::Sine:
    case BaseMotionProfile::Kind::MultiSine: {
        j["kind"] = p.kind == BaseMotionProfile::Kind::Sine ? "sine" : "multisine";
        json comps = json::array();
        for (const SineComponent& c : p.components) {
            comps.push_back(json{{"axis", c.axis == 0 ? "x" : (c.axis == 1 ? "y" : "z")},
                                 {"amplitude_rad_s", c.amplitude},
                                 {"frequency_hz", c.frequency_hz},
                                 {"phase_rad", c.phase_rad}});
        }
        j["components"] = comps;
        break;
    }
    case BaseMotionProfile::Kind::Recorded: {
        // Inline the samples so a saved scenario stays self-contained.
        j["kind"] = "recorded_inline";
        j["t"] = p.recorded_t;
        json rates = json::array();
        for (const Vec3& w : p.recorded_rate) {
            rates.push_back({w.x(), w.y(), w.z()});
        }
        j["rates"] = rates;
        break;
    }
    }
    return j;
}

TargetProfile parse_target(const json& j) {
    TargetProfile p;
    const std::string kind = j.value("kind", "fixed");
    if (kind == "fixed") {
        p.kind = TargetProfile::Kind::Fixed;
    } else if (kind == "drift") {
        p.kind = TargetProfile::Kind::Drift;
    } else {
        throw ConfigError("config: target kind '" + kind + "' unknown");
    }
    if (j.contains("direction")) {
        const auto d = j.at("direction").get<std::vector<double>>();
        if (d.size() != 3) {
            throw ConfigError("config: target direction needs three components");
        }
        p.direction = Vec3(d[0], d[1], d[2]).normalized();
    }
    // Convenience: small angular offsets from the +x boresight.
    const double yaw_off = get_num(j, "yaw_offset_mrad", 0.0) * 1e-3;
    const double pitch_off = get_num(j, "pitch_offset_mrad", 0.0) * 1e-3;
    if (yaw_off != 0.0 || pitch_off != 0.0) {
        p.direction = Vec3(std::cos(yaw_off) * std::cos(pitch_off),
                           std::sin(yaw_off) * std::cos(pitch_off), std::sin(pitch_off))
                          .normalized();
    }
    if (p.kind == TargetProfile::Kind::Drift) {
        const auto a = j.value("drift_axis", std::vector<double>{0.0, 0.0, 1.0});
        if (a.size() != 3) {
            throw ConfigError("config: drift_axis needs three components");
        }
        p.drift_axis = Vec3(a[0], a[1], a[2]);
        p.drift_rate = j.at("drift_rate_rad_s").get<double>();
    }
    return p;
}

json target_to_json(const TargetProfile& p) {
    json j{{"kind", p.kind == TargetProfile::Kind::Fixed ? "fixed" : "drift"},
           {"direction", {p.direction.x(), p.direction.y(), p.direction.z()}}};
    if (p.kind == TargetProfile::Kind::Drift) {
        j["drift_axis"] = {p.drift_axis.x(), p.drift_axis.y(), p.drift_axis.z()};
        j["drift_rate_rad_s"] = p.drift_rate;
    }
    return j;
}

CommandProfile parse_command(const json& j) {
    CommandProfile c;
    const std::string kind = j.value("kind", "constant");
    if (kind == "constant") {
        c.kind = CommandProfile::Kind::Constant;
        c.value = get_num(j, "value", 0.0);
    } else if (kind == "step") {
        c.kind = CommandProfile::Kind::Step;
        c.step_time = j.at("step_time_s").get<double>();
        c.value = j.at("value").get<double>();
        c.initial = get_num(j, "initial", 0.0);
    } else {
        throw ConfigError("config: command kind '" + kind + "' unknown");
    }
    return c;
}

json command_to_json(const CommandProfile& c) {
    if (c.kind == CommandProfile::Kind::Constant) {
        return json{{"kind", "constant"}, {"value", c.value}};
    }
    return json{{"kind", "step"},
                {"step_time_s", c.step_time},
                {"value", c.value},
                {"initial", c.initial}};
}

} // namespace

void load_recorded_motion(const std::string& csv_path, BaseMotionProfile& profile) {
    std::ifstream in(csv_path);
    if (!in) {
        throw ConfigError("config: cannot open recorded base-motion file " + csv_path);
    }
    profile.recorded_t.clear();
    profile.recorded_rate.clear();
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') {
            continue; // comment or header
        }
        std::istringstream row(line);
        double t, wx, wy, wz;
        char comma;
        if (!(row >> t >> comma >> wx >> comma >> wy >> comma >> wz)) {
            throw ConfigError("config: malformed recorded-motion row: " + line);
        }
        profile.recorded_t.push_back(t);
        profile.recorded_rate.emplace_back(wx, wy, wz);
    }
    if (profile.recorded_t.empty()) {
        throw ConfigError("config: recorded base-motion file has no samples: " + csv_path);
    }
}

Scenario parse_scenario(const std::string& json_text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
    }

    Scenario sc;
    try {
        sc.name = j.value("name", "scenario");

        if (j.contains("bodies")) {
            const json& b = j.at("bodies");
            if (b.contains("platform_inertia")) {
                sc.platform_inertia =
                    parse_inertia(b.at("platform_inertia"), BodyTag::Platform, "platform_inertia");
            }
            if (b.contains("gimbal_inertia")) {
                sc.gimbal_inertia =
                    parse_inertia(b.at("gimbal_inertia"), BodyTag::Gimbal, "gimbal_inertia");
            }
        }
        if (j.contains("friction")) {
            const json& f = j.at("friction");
            const double smoothing = get_num(f, "smoothing_rate_rad_s", 0.01);
            if (f.contains("yaw")) {
                sc.yaw_friction = parse_friction(f.at("yaw"), smoothing);
            }
            if (f.contains("pitch")) {
                sc.pitch_friction = parse_friction(f.at("pitch"), smoothing);
            }
        }
        if (j.contains("motors")) {
            const json& m = j.at("motors");
            if (m.contains("yaw")) {
                sc.yaw_motor = parse_motor(m.at("yaw"));
            }
            if (m.contains("pitch")) {
                sc.pitch_motor = parse_motor(m.at("pitch"));
            }
        }
        if (j.contains("sensors")) {
            const json& s = j.at("sensors");
            if (s.contains("gyro")) {
                const json& g = s.at("gyro");
                sc.gyro.full_scale = get_num(g, "full_scale_deg_s", 250.0) * kDeg;
                sc.gyro.sample_rate = get_num(g, "sample_rate_hz", 1000.0);
                sc.gyro.noise_std = get_num(g, "noise_std_deg_s", 0.02) * kDeg;
                sc.gyro.bias = get_num(g, "bias_deg_s", 0.05) * kDeg;
                sc.gyro.quantization_step = get_num(g, "quantization_step_deg_s", 0.0) * kDeg;
            }
            if (s.contains("pot")) {
                const json& p = s.at("pot");
                sc.pot.noise_std = get_num(p, "noise_std_rad", 0.0);
                sc.pot.quantization_step = get_num(p, "quantization_step_rad", 2.0 * M_PI / 4096.0);
                sc.pot.continuous_rotation = p.value("continuous_rotation", true);
            }
        }
        if (j.contains("camera")) {
            const json& c = j.at("camera");
            sc.camera.pixel_scale_mrad = get_num(c, "pixel_scale_mrad", 0.5);
            sc.camera.width = static_cast<int>(get_num(c, "width", 640));
            sc.camera.height = static_cast<int>(get_num(c, "height", 480));
            sc.camera.frame_rate = get_num(c, "frame_rate_hz", 20.0);
            sc.camera.processing_delay = get_num(c, "processing_delay_s", 0.05);
        }
        {
            const json& ctrls = j.at("controllers");
            sc.stab_yaw = parse_channel(ctrls.at("stab_yaw"), "stab_yaw");
            sc.stab_pitch = parse_channel(ctrls.at("stab_pitch"), "stab_pitch");
            sc.track_yaw = parse_channel(ctrls.at("track_yaw"), "track_yaw");
            sc.track_pitch = parse_channel(ctrls.at("track_pitch"), "track_pitch");
        }
        if (j.contains("profiles")) {
            const json& p = j.at("profiles");
            if (p.contains("base_motion")) {
                sc.base_motion = parse_base_motion(p.at("base_motion"), base_dir);
            }
            if (p.contains("target")) {
                sc.target = parse_target(p.at("target"));
            }
        }
        if (j.contains("commands")) {
            const json& c = j.at("commands");
            if (c.contains("yaw_track_mrad")) {
                sc.yaw_track_command = parse_command(c.at("yaw_track_mrad"));
            }
            if (c.contains("pitch_track_mrad")) {
                sc.pitch_track_command = parse_command(c.at("pitch_track_mrad"));
            }
            if (c.contains("yaw_rate_rad_s")) {
                sc.yaw_rate_command = parse_command(c.at("yaw_rate_rad_s"));
            }
            if (c.contains("pitch_rate_rad_s")) {
                sc.pitch_rate_command = parse_command(c.at("pitch_rate_rad_s"));
            }
        }
        {
            const json& r = j.at("run");
            sc.duration = r.at("duration_s").get<double>();
            sc.dt = get_num(r, "dt_s", 1e-3);
            sc.initial_psi = get_num(r, "initial_psi_deg", 0.0) * kDeg;
            sc.initial_theta = get_num(r, "initial_theta_deg", 0.0) * kDeg;
            sc.seed = static_cast<std::uint64_t>(get_num(r, "seed", 1.0));
            sc.log_decimation = static_cast<int>(get_num(r, "log_decimation", 1.0));
            sc.stabilization_enabled = r.value("stabilization_enabled", true);
            sc.tracking_enabled = r.value("tracking_enabled", true);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    sc.validate();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open scenario file " + path);
    }
    std::ostringstream text;
    text << in.rdbuf();
    const std::string dir = std::filesystem::path(path).parent_path().string();
    Scenario sc = parse_scenario(text.str(), dir.empty() ? "." : dir);
    return sc;
}

std::string scenario_to_json(const Scenario& sc) {
    json j;
    j["name"] = sc.name;
    j["bodies"] = json{{"platform_inertia", inertia_to_json(sc.platform_inertia)},
                       {"gimbal_inertia", inertia_to_json(sc.gimbal_inertia)}};
    j["friction"] = json{{"smoothing_rate_rad_s", sc.yaw_friction.smoothing_rate},
                         {"yaw", {{"viscous", sc.yaw_friction.viscous},
                                  {"coulomb", sc.yaw_friction.coulomb}}},
                         {"pitch", {{"viscous", sc.pitch_friction.viscous},
                                    {"coulomb", sc.pitch_friction.coulomb}}}};
    j["motors"] = json{{"yaw", motor_to_json(sc.yaw_motor)},
                       {"pitch", motor_to_json(sc.pitch_motor)}};
    j["sensors"] =
        json{{"gyro",
              {{"full_scale_deg_s", sc.gyro.full_scale / kDeg},
               {"sample_rate_hz", sc.gyro.sample_rate},
               {"noise_std_deg_s", sc.gyro.noise_std / kDeg},
               {"bias_deg_s", sc.gyro.bias / kDeg},
               {"quantization_step_deg_s", sc.gyro.quantization_step / kDeg}}},
             {"pot",
              {{"noise_std_rad", sc.pot.noise_std},
               {"quantization_step_rad", sc.pot.quantization_step},
               {"continuous_rotation", sc.pot.continuous_rotation}}}};
    j["camera"] = json{{"pixel_scale_mrad", sc.camera.pixel_scale_mrad},
                       {"width", sc.camera.width},
                       {"height", sc.camera.height},
                       {"frame_rate_hz", sc.camera.frame_rate},
                       {"processing_delay_s", sc.camera.processing_delay}};
    j["controllers"] = json{{"stab_yaw", channel_to_json(sc.stab_yaw)},
                            {"stab_pitch", channel_to_json(sc.stab_pitch)},
                            {"track_yaw", channel_to_json(sc.track_yaw)},
                            {"track_pitch", channel_to_json(sc.track_pitch)}};
    j["profiles"] = json{{"base_motion", base_motion_to_json(sc.base_motion)},
                         {"target", target_to_json(sc.target)}};
    json commands{{"yaw_track_mrad", command_to_json(sc.yaw_track_command)},
                  {"pitch_track_mrad", command_to_json(sc.pitch_track_command)}};
    if (sc.yaw_rate_command) {
        commands["yaw_rate_rad_s"] = command_to_json(*sc.yaw_rate_command);
    }
    if (sc.pitch_rate_command) {
        commands["pitch_rate_rad_s"] = command_to_json(*sc.pitch_rate_command);
    }
    j["commands"] = commands;
    j["run"] = json{{"duration_s", sc.duration},
                    {"dt_s", sc.dt},
                    {"initial_psi_deg", sc.initial_psi / kDeg},
                    {"initial_theta_deg", sc.initial_theta / kDeg},
                    {"seed", sc.seed},
                    {"log_decimation", sc.log_decimation},
                    {"stabilization_enabled", sc.stabilization_enabled},
                    {"tracking_enabled", sc.tracking_enabled}};
    return j.dump(2) + "\n";
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("config: cannot write scenario file " + path);
    }
    out << scenario_to_json(scenario);
}

} // namespace isp
