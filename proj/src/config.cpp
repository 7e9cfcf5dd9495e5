#include "nflab/config.hpp"

#include "nflab/report.hpp"

namespace nflab {

std::string canonical_config_string(const ExperimentConfig& cfg) {
    std::string text;
    auto put = [&text](const std::string& key, const std::string& value) {
        text += key;
        text += '=';
        text += value;
        text += '\n';
    };
    put("command", cfg.command);
    put("field", cfg.field);
    put("m", std::to_string(cfg.m));
    put("n", std::to_string(cfg.n));
    put("weights", cfg.weights);
    if (!cfg.theta.empty()) {
        std::string list;
        for (std::size_t i = 0; i < cfg.theta.size(); ++i) {
            if (i) list += ',';
            list += format_number(cfg.theta[i]);
        }
        put("theta", list);
    } else if (cfg.theta_from_seed) {
        put("theta_seed", std::to_string(cfg.theta_seed));
    }
    put("c", format_number(cfg.c));
    std::string grid;
    for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
        if (i) grid += ',';
        grid += format_number(cfg.t_grid[i]);
    }
    put("t_grid", grid);
    put("cap_x", cfg.cap_x);
    put("cap_y", cfg.cap_y);
    put("samples", std::to_string(cfg.samples));
    put("seed", std::to_string(cfg.seed));
    return text;
}

std::string config_hash(const ExperimentConfig& cfg) {
    return fnv1a_hex(canonical_config_string(cfg));
}

} // namespace nflab
