#include "evap/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "evap/oracle.hpp"

namespace evap {

using nlohmann::json;

namespace {

// Rejects unknown keys so typos fail loudly with the JSON path named.
void check_keys(const json& j, const std::string& path,
                const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("config: unknown key '" + path + "/" + it.key() + "'");
    }
}

double num(const json& j, const std::string& path, const char* key, double def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number())
        throw ConfigError("config: '" + path + "/" + key + "' must be a number");
    return j[key].get<double>();
}

int integer(const json& j, const std::string& path, const char* key, int def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number_integer())
        throw ConfigError("config: '" + path + "/" + key + "' must be an integer");
    return j[key].get<int>();
}

std::string str(const json& j, const std::string& path, const char* key,
                const std::string& def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_string())
        throw ConfigError("config: '" + path + "/" + key + "' must be a string");
    return j[key].get<std::string>();
}

MaterialParams parse_material(const json& j, bool nondim) {
    if (nondim) {
        check_keys(j, "material", {"T_star", "T_inf", "rho_inf", "rho_star"});
        RampSurrogate s;
        s.T_lo = num(j, "material", "T_star", 0.0);
        s.T_hi = num(j, "material", "T_inf", 1.0);
        s.rho_lo = num(j, "material", "rho_inf", 0.0);
        s.rho_hi = num(j, "material", "rho_star", 1.0);
        return MaterialParams::unit(s);
    }
    check_keys(j, "material",
               {"rho_d_kg_m3", "rho_g_kg_m3", "cp_g_J_kgK", "k_g_W_mK", "D_v_m2_s",
                "latent_heat_J_kg", "molar_mass_kg_mol", "R_gas_J_molK", "beta", "C_hk_m_s"});
    MaterialParams p = MaterialParams::water_air();
    p.rho_d = num(j, "material", "rho_d_kg_m3", p.rho_d);
    p.rho_g = num(j, "material", "rho_g_kg_m3", p.rho_g);
    p.cp_g = num(j, "material", "cp_g_J_kgK", p.cp_g);
    p.k_g = num(j, "material", "k_g_W_mK", p.k_g);
    p.D_v = num(j, "material", "D_v_m2_s", p.D_v);
    p.Lambda = num(j, "material", "latent_heat_J_kg", p.Lambda);
    p.M_w = num(j, "material", "molar_mass_kg_mol", p.M_w);
    p.R_gas = num(j, "material", "R_gas_J_molK", p.R_gas);
    p.beta = num(j, "material", "beta", p.beta);
    p.C_hk = num(j, "material", "C_hk_m_s", 0.0);  // 0 = derive from T_inf
    return p;
}

FlowConfig parse_flow(const json& j) {
    FlowConfig f;
    const std::string type = str(j, "flow", "type", "stagnant");
    if (type == "stagnant") {
        check_keys(j, "flow", {"type"});
        f.model = Stagnant{};
    } else if (type == "stokes") {
        check_keys(j, "flow", {"type", "V_inf_m_per_s"});
        Stokes s;
        s.v_inf = num(j, "flow", "V_inf_m_per_s", 0.0);
        if (s.v_inf < 0.0) throw ConfigError("config: 'flow/V_inf_m_per_s' must be >= 0");
        f.model = s;
    } else if (type == "acoustic") {
        check_keys(j, "flow",
                   {"type", "spl_db", "amplitude_pa", "frequency_hz", "c0_m_per_s"});
        Acoustic a;
        const bool has_spl = j.contains("spl_db");
        const bool has_amp = j.contains("amplitude_pa");
        if (has_spl == has_amp)
            throw ConfigError("config: acoustic flow needs exactly one of "
                              "'flow/spl_db' or 'flow/amplitude_pa'");
        if (has_spl) {
            a.amplitude = spl_to_amplitude(num(j, "flow", "spl_db", 0.0));
            f.spl_given = true;
        } else {
            a.amplitude = num(j, "flow", "amplitude_pa", 0.0);
            if (!(a.amplitude > 0.0))
                throw ConfigError("config: 'flow/amplitude_pa' must be positive");
        }
        a.omega = 2.0 * 3.14159265358979323846 * num(j, "flow", "frequency_hz", 58000.0);
        a.c0 = num(j, "flow", "c0_m_per_s", 343.0);
        f.model = a;
    } else {
        throw ConfigError("config: 'flow/type' must be stagnant, stokes, or acoustic");
    }
    return f;
}

template <typename Enum>
Enum parse_enum(const json& j, const std::string& path, const char* key,
                std::initializer_list<std::pair<const char*, Enum>> values, Enum def) {
    if (!j.contains(key)) return def;
    const std::string s = str(j, path, key, "");
    for (const auto& [name, v] : values)
        if (s == name) return v;
    std::string opts;
    for (const auto& [name, v] : values) opts += std::string(name) + " ";
    throw ConfigError("config: '" + path + "/" + key + "' must be one of: " + opts);
}

SolverConfig parse_solver(const json& j) {
    check_keys(j, "solver",
               {"dt_s", "t_end_s", "r_min_frac", "nonlinear", "newton_tol", "newton_max",
                "picard_max", "picard_min", "scheme", "initial_fields", "picard_start",
                "surface_recon", "check_invariants"});
    SolverConfig c;
    c.dt = num(j, "solver", "dt_s", 1.0);
    c.t_end = num(j, "solver", "t_end_s", 1e12);
    c.R_min_frac = num(j, "solver", "r_min_frac", 0.01);
    c.newton_tol = num(j, "solver", "newton_tol", 1e-10);
    c.newton_max = integer(j, "solver", "newton_max", 20);
    c.picard_max = integer(j, "solver", "picard_max", 200);
    c.picard_min = integer(j, "solver", "picard_min", 1);
    c.nonlinear_mode = parse_enum(j, "solver", "nonlinear",
                                  {std::pair{"newton", NonlinearMode::Newton},
                                   std::pair{"picard", NonlinearMode::PicardUL}},
                                  NonlinearMode::Newton);
    c.scheme = parse_enum(j, "solver", "scheme",
                          {std::pair{"upwind", Scheme::Upwind},
                           std::pair{"central", Scheme::Central}},
                          Scheme::Upwind);
    // config-level default is quasi-steady: the kinetic initial spike at
    // dt ~ 1 s otherwise empties the droplet in one explicit radius step
    c.initial_fields = parse_enum(j, "solver", "initial_fields",
                                  {std::pair{"far-field", InitialFieldsPolicy::FarField},
                                   std::pair{"quasi-steady", InitialFieldsPolicy::QuasiSteady}},
                                  InitialFieldsPolicy::QuasiSteady);
    c.picard_start = parse_enum(j, "solver", "picard_start",
                                {std::pair{"previous", PicardStart::PreviousFields},
                                 std::pair{"upper-solution", PicardStart::UpperSolution}},
                                PicardStart::PreviousFields);
    c.surface_recon = parse_enum(j, "solver", "surface_recon",
                                 {std::pair{"linear", SurfaceRecon::LinearExtrapolation},
                                  std::pair{"first-order", SurfaceRecon::FirstOrder}},
                                 SurfaceRecon::LinearExtrapolation);
    if (j.contains("check_invariants")) {
        if (!j["check_invariants"].is_boolean())
            throw ConfigError("config: 'solver/check_invariants' must be a boolean");
        c.check_invariants = j["check_invariants"].get<bool>();
    }
    c.validate();
    return c;
}

GridConfig parse_grid(const json& j) {
    check_keys(j, "grid", {"n_theta", "n_r", "r_out", "stretch"});
    GridConfig g;
    g.n_theta = integer(j, "grid", "n_theta", g.n_theta);
    g.n_r = integer(j, "grid", "n_r", g.n_r);
    g.r_out = num(j, "grid", "r_out", g.r_out);
    g.stretch = num(j, "grid", "stretch", g.stretch);
    return g;
}

}  // namespace

double RunConfig::R0() const {
    if (R0_m) return *R0_m;
    if (volume_ul) return radius_from_volume_ul(*volume_ul);
    throw ConfigError("config: droplet size missing");
}

DryingState RunConfig::make_drying() const {
    if (nondimensional) return DryingState::nondimensional(material);
    return DryingState::from_conditions(material, T_inf_C, RH_inf);
}

AxiGrid RunConfig::make_grid() const {
    return build_grid(grid.n_theta, grid.n_r, grid.r_out, grid.stretch);
}

RunConfig RunConfig::from_json(const json& j_in) {
    const json& j = j_in.contains("config") ? j_in["config"] : j_in;
    check_keys(j, "",
               {"label", "mode", "material", "drying", "droplet", "flow", "grid", "solver"});
    RunConfig c;
    c.label = str(j, "", "label", "run");
    const std::string mode = str(j, "", "mode", "dimensional");
    if (mode != "dimensional" && mode != "nondimensional")
        throw ConfigError("config: 'mode' must be dimensional or nondimensional");
    c.nondimensional = mode == "nondimensional";

    c.material = parse_material(j.contains("material") ? j["material"] : json::object(),
                                c.nondimensional);

    if (!c.nondimensional) {
        const json jd = j.contains("drying") ? j["drying"] : json::object();
        check_keys(jd, "drying", {"T_inf_C", "RH_inf"});
        c.T_inf_C = num(jd, "drying", "T_inf_C", 60.0);
        c.RH_inf = num(jd, "drying", "RH_inf", 0.1);
        if (c.material.C_hk <= 0.0) c.material.C_hk = hk_coefficient(c.material, c.T_inf_C);
    } else if (j.contains("drying")) {
        throw ConfigError("config: nondimensional mode takes bounds in 'material', not 'drying'");
    }

    if (j.contains("droplet")) {
        const json& jp = j["droplet"];
        check_keys(jp, "droplet", {"volume_ul", "R0_m", "R0"});
        if (jp.contains("volume_ul")) c.volume_ul = num(jp, "droplet", "volume_ul", 0.0);
        if (jp.contains("R0_m")) c.R0_m = num(jp, "droplet", "R0_m", 0.0);
        if (jp.contains("R0")) c.R0_m = num(jp, "droplet", "R0", 0.0);  // nondimensional radius
        if (c.volume_ul.has_value() == c.R0_m.has_value())
            throw ConfigError("config: 'droplet' needs exactly one of volume_ul or R0_m");
    } else {
        c.volume_ul = c.nondimensional ? std::optional<double>{} : 1.0;  // the 1 ul droplet
        if (c.nondimensional) c.R0_m = 25.0;
    }
    if (!(c.R0() > 0.0)) throw ConfigError("config: droplet size must be positive");

    c.flow = parse_flow(j.contains("flow") ? j["flow"] : json::object());
    c.grid = parse_grid(j.contains("grid") ? j["grid"] : json::object());
    c.solver = parse_solver(j.contains("solver") ? j["solver"] : json::object());

    try {
        c.material.validate();
        c.make_drying().validate(c.material);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

json RunConfig::to_json() const {
    json j;
    j["label"] = label;
    j["mode"] = nondimensional ? "nondimensional" : "dimensional";
    if (nondimensional) {
        const RampSurrogate& s = *material.surrogate;
        j["material"] = {{"T_star", s.T_lo},
                         {"T_inf", s.T_hi},
                         {"rho_inf", s.rho_lo},
                         {"rho_star", s.rho_hi}};
        j["droplet"] = {{"R0", R0()}};
    } else {
        j["material"] = {{"rho_d_kg_m3", material.rho_d},
                         {"rho_g_kg_m3", material.rho_g},
                         {"cp_g_J_kgK", material.cp_g},
                         {"k_g_W_mK", material.k_g},
                         {"D_v_m2_s", material.D_v},
                         {"latent_heat_J_kg", material.Lambda},
                         {"molar_mass_kg_mol", material.M_w},
                         {"R_gas_J_molK", material.R_gas},
                         {"beta", material.beta},
                         {"C_hk_m_s", material.C_hk}};
        j["drying"] = {{"T_inf_C", T_inf_C}, {"RH_inf", RH_inf}};
        if (volume_ul)
            j["droplet"] = {{"volume_ul", *volume_ul}};
        else
            j["droplet"] = {{"R0_m", *R0_m}};
    }
    if (std::holds_alternative<Stagnant>(flow.model)) {
        j["flow"] = {{"type", "stagnant"}};
    } else if (const Stokes* s = std::get_if<Stokes>(&flow.model)) {
        j["flow"] = {{"type", "stokes"}, {"V_inf_m_per_s", s->v_inf}};
    } else {
        const Acoustic& a = std::get<Acoustic>(flow.model);
        j["flow"] = {{"type", "acoustic"},
                     {"frequency_hz", a.omega / (2.0 * 3.14159265358979323846)},
                     {"c0_m_per_s", a.c0}};
        if (flow.spl_given)
            j["flow"]["spl_db"] = amplitude_to_spl(a.amplitude);
        else
            j["flow"]["amplitude_pa"] = a.amplitude;
    }
    j["grid"] = {{"n_theta", grid.n_theta},
                 {"n_r", grid.n_r},
                 {"r_out", grid.r_out},
                 {"stretch", grid.stretch}};
    const char* nl = solver.nonlinear_mode == NonlinearMode::Newton ? "newton" : "picard";
    j["solver"] = {
        {"dt_s", solver.dt},
        {"t_end_s", solver.t_end},
        {"r_min_frac", solver.R_min_frac},
        {"nonlinear", nl},
        {"newton_tol", solver.newton_tol},
        {"newton_max", solver.newton_max},
        {"picard_max", solver.picard_max},
        {"picard_min", solver.picard_min},
        {"scheme", solver.scheme == Scheme::Upwind ? "upwind" : "central"},
        {"initial_fields", solver.initial_fields == InitialFieldsPolicy::QuasiSteady
                               ? "quasi-steady"
                               : "far-field"},
        {"picard_start", solver.picard_start == PicardStart::UpperSolution
                             ? "upper-solution"
                             : "previous"},
        {"surface_recon", solver.surface_recon == SurfaceRecon::LinearExtrapolation
                              ? "linear"
                              : "first-order"},
        {"check_invariants", solver.check_invariants}};
    return j;
}

RunConfig RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }
    return from_json(j);
}

SweepConfig SweepConfig::from_json(const json& j) {
    check_keys(j, "", {"base", "members"});
    if (!j.contains("base") || !j.contains("members"))
        throw ConfigError("sweep config: needs 'base' and 'members'");
    SweepConfig s;
    s.base = RunConfig::from_json(j["base"]);
    if (!j["members"].is_array() || j["members"].empty())
        throw ConfigError("sweep config: 'members' must be a non-empty array");
    int k = 0;
    std::set<std::string> labels;
    for (const json& m : j["members"]) {
        check_keys(m, "members[" + std::to_string(k) + "]", {"label", "flow"});
        if (!m.contains("flow"))
            throw ConfigError("sweep config: member " + std::to_string(k) + " lacks 'flow'");
        const std::string label =
            str(m, "members", "label", "member" + std::to_string(k));
        if (!labels.insert(label).second)
            throw ConfigError("sweep config: duplicate member label '" + label +
                              "' (labels name the per-member output directories)");
        s.members.emplace_back(label, parse_flow(m["flow"]));
        ++k;
    }
    return s;
}

SweepConfig SweepConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("sweep config: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("sweep config: " + path + ": " + e.what());
    }
    return from_json(j);
}

}  // namespace evap
