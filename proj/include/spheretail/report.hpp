// Per-claim verification reports: worst margin over a grid, where it was
// attained, the tolerance in force, and a pass flag.

#pragma once

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

namespace spheretail {

struct VerificationReport {
    std::string claim;
    std::string grid;
    double worst_margin = std::numeric_limits<double>::infinity();
    std::string worst_point;
    double tolerance = 0.0;
    bool pass = true;
    std::vector<std::string> notes;

    // Record one grid cell: margin must stay >= -tolerance.
    void record(double margin, const std::string& point) {
        if (margin < worst_margin) {
            worst_margin = margin;
            worst_point = point;
        }
        if (margin < -tolerance) pass = false;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["claim"] = claim;
        j["grid"] = grid;
        j["worst_margin"] = worst_margin;
        j["worst_point"] = worst_point;
        j["tolerance"] = tolerance;
        j["pass"] = pass;
        if (!notes.empty()) j["notes"] = notes;
        return j;
    }
};

}  // namespace spheretail
