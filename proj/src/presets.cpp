#include "nflab/presets.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nflab/errors.hpp"

namespace nflab {

namespace {

FieldPreset preset_q() {
    FieldPreset p;
    p.name = "Q";
    p.min_poly = {0, 1};
    p.power_basis = true;
    p.torsion_order = 2;
    p.torsion_gen = {-1};
    return p;
}

FieldPreset preset_qi() {
    FieldPreset p;
    p.name = "Qi";
    p.min_poly = {1, 0, 1};
    p.power_basis = true;
    p.torsion_order = 4;
    p.torsion_gen = {0, 1};
    return p;
}

FieldPreset preset_qsqrt2() {
    FieldPreset p;
    p.name = "Qsqrt2";
    p.min_poly = {-2, 0, 1};
    p.power_basis = true;
    p.fundamental_units = {{1, 1}};
    p.torsion_order = 2;
    p.torsion_gen = {-1, 0};
    return p;
}

FieldPreset preset_qsqrt5() {
    FieldPreset p;
    p.name = "Qsqrt5";
    p.min_poly = {-1, -1, 1};
    // basis {1, phi} with phi^2 = 1 + phi, given as an explicit table
    p.power_basis = false;
    p.mult_table = {1, 0, 0, 1, 0, 1, 1, 1};
    p.fundamental_units = {{0, 1}};
    p.torsion_order = 2;
    p.torsion_gen = {-1, 0};
    return p;
}

FieldPreset preset_cubic() {
    FieldPreset p;
    p.name = "cubic";
    p.min_poly = {-1, -1, 0, 1};
    p.power_basis = true;
    p.fundamental_units = {{0, 1, 0}};
    p.torsion_order = 2;
    p.torsion_gen = {-1, 0, 0};
    return p;
}

std::vector<std::int64_t> int_list(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_array())
        throw ValidationError("preset: missing integer array '" + key + "'");
    std::vector<std::int64_t> out;
    for (const auto& v : j[key]) {
        if (!v.is_number_integer())
            throw ValidationError("preset: '" + key + "' must contain integers only");
        out.push_back(v.get<std::int64_t>());
    }
    return out;
}

} // namespace

std::vector<std::string> list_presets() { return {"Q", "Qi", "Qsqrt2", "Qsqrt5", "cubic"}; }

FieldPreset builtin_preset(const std::string& name) {
    if (name == "Q") return preset_q();
    if (name == "Qi") return preset_qi();
    if (name == "Qsqrt2") return preset_qsqrt2();
    if (name == "Qsqrt5") return preset_qsqrt5();
    if (name == "cubic") return preset_cubic();
    throw ValidationError("unknown preset '" + name + "'");
}

FieldPreset load_preset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open preset file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("preset file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ValidationError("preset file must hold a JSON object");

    FieldPreset p;
    if (!j.contains("name") || !j["name"].is_string())
        throw ValidationError("preset: missing string 'name'");
    p.name = j["name"].get<std::string>();
    p.min_poly = int_list(j, "min_poly");
    p.power_basis = j.value("power_basis", true);
    if (!p.power_basis) p.mult_table = int_list(j, "mult_table");
    if (j.contains("fundamental_units")) {
        if (!j["fundamental_units"].is_array())
            throw ValidationError("preset: 'fundamental_units' must be an array of arrays");
        for (size_t i = 0; i < j["fundamental_units"].size(); ++i) {
            const auto& u = j["fundamental_units"][i];
            if (!u.is_array())
                throw ValidationError("preset: each fundamental unit must be an array");
            std::vector<std::int64_t> coords;
            for (const auto& v : u) {
                if (!v.is_number_integer())
                    throw ValidationError("preset: unit coordinates must be integers");
                coords.push_back(v.get<std::int64_t>());
            }
            p.fundamental_units.push_back(std::move(coords));
        }
    }
    if (!j.contains("torsion_order") || !j["torsion_order"].is_number_integer())
        throw ValidationError("preset: missing integer 'torsion_order'");
    p.torsion_order = j["torsion_order"].get<int>();
    p.torsion_gen = int_list(j, "torsion_gen");
    return p;
}

FieldPreset resolve_preset(const std::string& name_or_path) {
    for (const auto& n : list_presets())
        if (n == name_or_path) return builtin_preset(n);

    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::exists(name_or_path, ec)) return load_preset_file(name_or_path);

    if (const char* env = std::getenv("NFLAB_PRESET_PATH")) {
        std::stringstream dirs(env);
        std::string dir;
        while (std::getline(dirs, dir, ':')) {
            if (dir.empty()) continue;
            fs::path cand = fs::path(dir) / (name_or_path + ".json");
            if (fs::exists(cand, ec)) return load_preset_file(cand.string());
        }
    }
    throw ValidationError("cannot resolve preset '" + name_or_path +
                          "': not built in, not a file, not on NFLAB_PRESET_PATH");
}

FieldHandle field_from_preset(const std::string& name_or_path) {
    return build_field(resolve_preset(name_or_path));
}

} // namespace nflab
