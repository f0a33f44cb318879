#pragma once

#include <map>
#include <string>
#include <vector>

#include "lp_besov.hpp"

namespace lagns {

/// Perturbation state (a, v) at time t, with a = eta - reference volume.
struct FluidState {
    SpectralField a;
    SpectralField v;
    double t = 0.0;

    const Grid& grid() const { return a.grid(); }

    static FluidState zeros(const Grid& g, double t = 0.0) {
        return {SpectralField::zeros(g), SpectralField::zeros(g), t};
    }
};

/// Names of the block-norm histories a trajectory records.
namespace track {
inline const std::string a2 = "a@2";        // ||Delta_j a||_{L^2}
inline const std::string v2 = "v@2";        // ||Delta_j v||_{L^2}
inline const std::string ay_p = "a_y@p";    // ||Delta_j a_y||_{L^p}
inline const std::string v_p = "v@p";       // ||Delta_j v||_{L^p}
inline const std::string vyy_p = "v_yy@p";  // ||Delta_j v_yy||_{L^p}
inline const std::string vt_p = "v_t@p";    // ||Delta_j v_t||_{L^p}
}  // namespace track

/// Time-stamped snapshots with per-ring norm histories and scalar diagnostics.
struct Trajectory {
    std::vector<double> times;
    std::vector<FluidState> states;  ///< empty when states were not kept
    std::map<std::string, BlockNormHistory> histories;
    std::map<std::string, std::vector<double>> series;  ///< one value per snapshot

    bool empty() const { return times.empty(); }
    std::size_t size() const { return times.size(); }

    const BlockNormHistory& history(const std::string& name) const {
        auto it = histories.find(name);
        if (it == histories.end()) throw Error("trajectory has no history '" + name + "'");
        return it->second;
    }
    const std::vector<double>& get_series(const std::string& name) const {
        auto it = series.find(name);
        if (it == series.end()) throw Error("trajectory has no series '" + name + "'");
        return it->second;
    }
};

}  // namespace lagns
