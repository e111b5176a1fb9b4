#include "scarma/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "scarma/errors.hpp"

namespace scarma {

namespace {

using ordered_json = nlohmann::ordered_json;

LoadMode parse_mode(const ordered_json& value) {
    if (value.is_string()) {
        const std::string m = value.get<std::string>();
        if (m == "base") return LoadMode::base;
        if (m == "peak") return LoadMode::peak;
    }
    throw DataError("config: mode must be \"base\" or \"peak\"");
}

double positive_number(const ordered_json& value, const char* key) {
    if (!value.is_number() || !(value.get<double>() > 0.0))
        throw DataError(std::string("config: ") + key + " must be a positive number");
    return value.get<double>();
}

int bounded_int(const ordered_json& value, const char* key, long long lo, long long hi) {
    if (!value.is_number_integer() || value.get<long long>() < lo || value.get<long long>() > hi)
        throw DataError(std::string("config: ") + key + " must be an integer in [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(value.get<long long>());
}

// %.17g reproduces the double bit-exactly through strtod, matching the
// market serialization convention.
std::string fmt_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw DataError("emit_report: cannot write " + path.string());
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.calib.mode == b.calib.mode && a.calib.v == b.calib.v && a.calib.M_f == b.calib.M_f &&
           a.calib.h == b.calib.h && a.calib.u_star_min == b.calib.u_star_min &&
           a.calib.u_star_max == b.calib.u_star_max && a.seed == b.seed &&
           a.rng_streams == b.rng_streams;
}

RunConfig parse_config(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw DataError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw DataError("config: top level must be a JSON object");

    RunConfig rc;
    rc.calib = default_config(doc.contains("mode") ? parse_mode(doc["mode"]) : LoadMode::base);
    for (const auto& [key, value] : doc.items()) {
        if (key == "mode")
            continue;  // consumed above so the defaults follow the mode
        else if (key == "u_star_min")
            rc.calib.u_star_min = bounded_int(value, "u_star_min", 0, 100000);
        else if (key == "u_star_max")
            rc.calib.u_star_max = bounded_int(value, "u_star_max", 0, 100000);
        else if (key == "v")
            rc.calib.v = positive_number(value, "v");
        else if (key == "M_f")
            rc.calib.M_f = positive_number(value, "M_f");
        else if (key == "h")
            rc.calib.h = positive_number(value, "h");
        else if (key == "seed") {
            if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0))
                throw DataError("config: seed must be a non-negative integer");
            rc.seed = value.get<std::uint64_t>();
        } else if (key == "rng_streams")
            rc.rng_streams = bounded_int(value, "rng_streams", 1, 4096);
        else
            throw DataError("config: unknown key \"" + key + "\"");
    }
    validate_config(rc.calib);
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config) {
    ordered_json j;
    j["mode"] = config.calib.mode == LoadMode::base ? "base" : "peak";
    j["u_star_min"] = config.calib.u_star_min;
    j["u_star_max"] = config.calib.u_star_max;
    j["v"] = config.calib.v;
    j["M_f"] = config.calib.M_f;
    j["h"] = config.calib.h;
    j["seed"] = config.seed;
    j["rng_streams"] = config.rng_streams;
    return j.dump(2) + "\n";
}

std::string summary_json(const CalibrationResult& result) {
    const ThresholdBundle& tb = result.bundles.at(result.chosen_index);
    int failed = 0;
    for (const auto& d : result.diagnostics) failed += d.ok ? 0 : 1;

    ordered_json j;
    j["schema"] = "scarma-calibration-summary-v1";

    ordered_json season;
    season["stage"] = "seasonality_fit";
    season["mode"] = result.seasonality.params.mode == LoadMode::base ? "base" : "peak";
    season["c"] = result.seasonality.params.c;
    season["iterations"] = result.seasonality.iterations;
    season["short_history"] = result.seasonality.short_history;
    j["seasonality_fit"] = season;

    ordered_json sel;
    sel["stage"] = "threshold_selection";
    sel["chosen_u_star"] = result.chosen_u_star;
    sel["error"] = tb.error;
    sel["evaluated"] = result.diagnostics.size();
    sel["failed"] = failed;
    j["threshold_selection"] = sel;

    ordered_json longend;
    longend["stage"] = "longend_regression";
    longend["c_const"] = tb.longend.c_const;
    longend["eq_Z1"] = tb.longend.eq_Z1;
    longend["quotes_used"] = tb.longend.quotes_used;
    j["longend_regression"] = longend;

    ordered_json zf;
    zf["stage"] = "z_filter";
    zf["days"] = tb.z_path.z.size();
    int flagged = 0;
    for (auto f : tb.z_path.flagged) flagged += f ? 1 : 0;
    zf["flagged"] = flagged;
    j["z_filter"] = zf;

    ordered_json carma;
    carma["stage"] = "carma_fit";
    carma["a"] = tb.model.a;
    carma["b"] = tb.model.b;
    ordered_json lambda = ordered_json::array();
    for (const auto& l : tb.lambda) {
        ordered_json root;
        root["re"] = l.real();
        root["im"] = l.imag();
        lambda.push_back(root);
    }
    carma["lambda"] = lambda;
    j["carma_fit"] = carma;

    ordered_json drv;
    drv["stage"] = "driver_estimation";
    ordered_json eps;
    eps["alpha"] = tb.eps_law.alpha;
    eps["beta"] = tb.eps_law.beta;
    eps["gamma"] = tb.eps_law.gamma;
    eps["mu"] = tb.eps_law.mu;
    drv["epsilon"] = eps;
    ordered_json lv;
    lv["alpha"] = tb.driver.alpha;
    lv["beta"] = tb.driver.beta;
    lv["gamma"] = tb.driver.gamma;
    lv["mu"] = tb.driver.mu;
    drv["driver"] = lv;
    drv["ep_L1"] = tb.ep_L1;
    j["driver_estimation"] = drv;

    ordered_json zl;
    zl["stage"] = "z_law_fit";
    zl["alpha"] = tb.z_law.alpha;
    zl["beta"] = tb.z_law.beta;
    zl["delta"] = tb.z_law.delta;
    zl["mu"] = tb.z_law.mu;
    j["z_law_fit"] = zl;

    ordered_json ms;
    ms["stage"] = "measure_solve";
    ms["theta_Z"] = tb.theta_Z;
    ms["theta_L"] = tb.theta_L;
    ms["eq_Z1"] = tb.mc.eq_Z1;
    ms["eq_L1"] = tb.mc.eq_L1;
    ms["c_const"] = tb.mc.c_const;
    ms["driver_shift"] = tb.eq_L1 - tb.ep_L1;
    j["measure_solve"] = ms;

    ordered_json sf;
    sf["stage"] = "state_filter";
    sf["burn_in"] = tb.burn_in;
    sf["observations"] = tb.states.states.size();
    j["state_filter"] = sf;

    ordered_json pc;
    pc["stage"] = "premium_curves";
    pc["rows"] = tb.curves.u.size();
    pc["missing"] = tb.curves.missing;
    j["premium_curves"] = pc;

    return j.dump(2) + "\n";
}

std::vector<std::string> emit_report(const CalibrationResult& result, const std::string& out_dir) {
    const ThresholdBundle& tb = result.bundles.at(result.chosen_index);
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("emit_report: cannot create " + dir.string());

    std::vector<std::string> written;
    const auto emit = [&](const char* name, const std::string& content) {
        const auto path = dir / name;
        write_file(path, content);
        written.push_back(path.string());
    };

    std::string z_csv = "t,z,quoted,flagged\n";
    for (std::size_t t = 0; t < tb.z_path.z.size(); ++t) {
        z_csv += std::to_string(t) + ',' + fmt_num(tb.z_path.z[t]) + ',' +
                 std::to_string(int(tb.z_path.quoted[t])) + ',' +
                 std::to_string(int(tb.z_path.flagged[t])) + '\n';
    }
    emit("z_path.csv", z_csv);

    const int p = tb.model.p;
    std::string s_csv = "t";
    for (int i = 1; i <= p; ++i) s_csv += ",x" + std::to_string(i);
    s_csv += ",y\n";
    for (std::size_t t = 0; t < tb.states.states.size(); ++t) {
        s_csv += std::to_string(t);
        for (int i = 0; i < p; ++i) s_csv += ',' + fmt_num(tb.states.states[t][i]);
        double y = 0.0;
        for (int i = 0; i < p && i < int(tb.model.b.size()); ++i)
            y += tb.model.b[size_t(i)] * tb.states.states[t][i];
        s_csv += ',' + fmt_num(y) + '\n';
    }
    emit("states.csv", s_csv);

    std::string p_csv = "u,empirical,theoretical\n";
    for (std::size_t i = 0; i < tb.curves.u.size(); ++i) {
        p_csv += std::to_string(tb.curves.u[i]) + ',' + fmt_num(tb.curves.empirical[i]) + ',' +
                 fmt_num(tb.curves.theoretical[i]) + '\n';
    }
    emit("premium_curves.csv", p_csv);

    std::string e_csv = "u_star,ok,error\n";
    for (const auto& d : result.diagnostics) {
        e_csv += std::to_string(d.u_star) + ',' + (d.ok ? "1," : "0,") +
                 (d.ok ? fmt_num(d.error) : "nan") + '\n';
    }
    emit("error_function.csv", e_csv);

    emit("summary.json", summary_json(result));
    return written;
}

}  // namespace scarma
