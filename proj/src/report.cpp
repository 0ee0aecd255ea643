#include "smtw/report.hpp"

#include <json.hpp>

namespace smtw {

std::string report_to_json(const SolveReport& report) {
    nlohmann::json j;
    j["problem"] = report.objective;
    j["method"] = report.method;
    if (report.objective == "gsm") {
        nlohmann::json pairs = nlohmann::json::array();
        for (auto [tm, tw] : report.pair_set) pairs.push_back({tm, tw});
        j["optimum"] = pairs;
    } else {
        j["optimum"] = report.optimum;
    }
    if (report.witness) {
        nlohmann::json pairs = nlohmann::json::array();
        for (auto [m, w] : report.witness->pairs()) pairs.push_back({m + 1, w + 1});
        j["witness"] = pairs;
    } else {
        j["witness"] = nullptr;
    }
    j["stats"] = {{"states", report.stats.states},
                  {"dense_cells", report.stats.dense_cells},
                  {"set_entries", report.stats.set_entries},
                  {"nodes", report.stats.nodes},
                  {"width", report.stats.width},
                  {"wall_ms", report.stats.wall_ms}};
    return j.dump(2);
}

}  // namespace smtw
