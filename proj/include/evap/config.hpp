#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "evap/errors.hpp"
#include "evap/flowfields.hpp"
#include "evap/geometry.hpp"
#include "evap/physics.hpp"
#include "evap/timeloop.hpp"

namespace evap {

struct GridConfig {
    int n_theta = 32;
    int n_r = 64;
    double r_out = 50.0;
    double stretch = 1.08;
};

struct FlowConfig {
    VelocityModel model = Stagnant{};
    bool spl_given = false;  // which acoustic input the user wrote, echoed in metadata
};

/// One fully resolved run: physics, drying conditions, droplet size, flow,
/// grid and solver settings. JSON keys carry their units in the name.
struct RunConfig {
    std::string label = "run";
    bool nondimensional = false;

    MaterialParams material;  // C_hk frozen at load time
    double T_inf_C = 60.0;    // dimensional drying inputs
    double RH_inf = 0.1;

    std::optional<double> volume_ul;  // exactly one of these two
    std::optional<double> R0_m;

    FlowConfig flow;
    GridConfig grid;
    SolverConfig solver;

    double R0() const;
    DryingState make_drying() const;
    AxiGrid make_grid() const;

    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    /// Reads a config document; a run_meta.json (with its "config" object)
    /// is accepted as well, so runs round-trip.
    static RunConfig load_file(const std::string& path);
};

/// Flow-variant sweep sharing one base configuration.
struct SweepConfig {
    RunConfig base;
    std::vector<std::pair<std::string, FlowConfig>> members;  // label -> flow

    static SweepConfig from_json(const nlohmann::json& j);
    static SweepConfig load_file(const std::string& path);
};

}  // namespace evap
